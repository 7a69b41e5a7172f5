//! TOML set specifications.
//!
//! ```toml
//! kind = "halfspace"      # halfspace | intersection | ball | interval_union | full | empty
//! w = [1.0, 0.0]
//! theta = 0.0
//! signed_distance = true  # optional, default true
//! ```
//!
//! `intersection` takes `halfspaces = [{ w = [...], theta = ... }, ...]`,
//! `ball` takes `center` and `radius`, `interval_union` takes
//! `intervals = [[a, b], ...]` (`-inf`/`inf` allowed), and `full`/`empty`
//! take `dim`. `dim` is optional elsewhere and checked when given.

use std::path::Path;

use nonneg_approx::sets::{Halfspace, SetKind};
use nonneg_approx::ConceptSet;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetSpecKind {
    Halfspace,
    Intersection,
    Ball,
    IntervalUnion,
    Full,
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceSpec {
    pub w: Vec<f64>,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    pub kind: SetSpecKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<HalfspaceSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signed_distance: Option<bool>,
}

fn field<T>(value: Option<T>, name: &str, kind: SetSpecKind) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::invalid(format!("set spec of kind {kind:?} needs field `{name}`")))
}

impl SetSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("cannot read set spec {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::invalid(format!("bad set spec: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("set spec serializes")
    }

    pub fn to_set(&self) -> Result<ConceptSet, CliError> {
        let kind = self.kind;
        let set = match kind {
            SetSpecKind::Halfspace => {
                ConceptSet::halfspace(field(self.w.clone(), "w", kind)?, field(self.theta, "theta", kind)?)?
            }
            SetSpecKind::Intersection => {
                let hs = field(self.halfspaces.as_ref(), "halfspaces", kind)?
                    .iter()
                    .map(|h| Halfspace::new(h.w.clone(), h.theta))
                    .collect::<Result<Vec<_>, _>>()?;
                ConceptSet::intersection(hs)?
            }
            SetSpecKind::Ball => {
                ConceptSet::ball(field(self.center.clone(), "center", kind)?, field(self.radius, "radius", kind)?)?
            }
            SetSpecKind::IntervalUnion => {
                let iv = field(self.intervals.as_ref(), "intervals", kind)?;
                ConceptSet::interval_union(iv.iter().map(|&[a, b]| (a, b)).collect())?
            }
            SetSpecKind::Full => ConceptSet::full(field(self.dim, "dim", kind)?),
            SetSpecKind::Empty => ConceptSet::empty(field(self.dim, "dim", kind)?),
        };
        if let Some(d) = self.dim {
            if d != set.dim() {
                return Err(CliError::invalid(format!(
                    "set spec declares dim = {d} but its parameters have dimension {}",
                    set.dim()
                )));
            }
        }
        Ok(match self.signed_distance {
            Some(false) => set.without_signed_distance(),
            _ => set,
        })
    }

    /// Spec describing `set`, so generated families can be written back out.
    pub fn from_set(set: &ConceptSet) -> Self {
        let mut spec = SetSpec {
            kind: SetSpecKind::Full,
            dim: Some(set.dim()),
            w: None,
            theta: None,
            halfspaces: None,
            center: None,
            radius: None,
            intervals: None,
            signed_distance: (!set.has_signed_distance()).then_some(false),
        };
        match set.kind() {
            SetKind::Halfspace(h) => {
                spec.kind = SetSpecKind::Halfspace;
                spec.w = Some(h.normal().to_vec());
                spec.theta = Some(h.theta());
            }
            SetKind::Intersection(hs) => {
                spec.kind = SetSpecKind::Intersection;
                spec.halfspaces = Some(
                    hs.iter()
                        .map(|h| HalfspaceSpec {
                            w: h.normal().to_vec(),
                            theta: h.theta(),
                        })
                        .collect(),
                );
            }
            SetKind::Ball { center, radius } => {
                spec.kind = SetSpecKind::Ball;
                spec.center = Some(center.clone());
                spec.radius = Some(*radius);
            }
            SetKind::IntervalUnion(iv) => {
                spec.kind = SetSpecKind::IntervalUnion;
                spec.intervals = Some(iv.iter().map(|&(a, b)| [a, b]).collect());
            }
            SetKind::Full => spec.kind = SetSpecKind::Full,
            SetKind::Empty => spec.kind = SetSpecKind::Empty,
        }
        spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let cases = [
            "kind = \"halfspace\"\nw = [1.0]\ntheta = 0.0",
            "kind = \"intersection\"\nhalfspaces = [{ w = [1.0, 0.0], theta = 1.0 }, { w = [0.0, 1.0], theta = 0.5 }]",
            "kind = \"ball\"\ncenter = [0.0, 0.0]\nradius = 1.0",
            "kind = \"interval_union\"\nintervals = [[-inf, -1.0], [0.0, 1.0]]",
            "kind = \"full\"\ndim = 3",
            "kind = \"empty\"\ndim = 2",
        ];
        for text in cases {
            let set = SetSpec::parse(text).unwrap().to_set().unwrap();
            let back = SetSpec::from_set(&set).to_set().unwrap();
            assert_eq!(set, back, "{text}");
        }
    }

    #[test]
    fn rejects_missing_and_unknown_fields() {
        assert!(SetSpec::parse("kind = \"halfspace\"\nw = [1.0]").unwrap().to_set().is_err());
        assert!(SetSpec::parse("kind = \"halfspace\"\nw = [1.0]\ntheta = 0.0\nbogus = 1").is_err());
        assert!(SetSpec::parse("kind = \"cube\"").is_err());
    }

    #[test]
    fn dim_must_agree() {
        let err = SetSpec::parse("kind = \"halfspace\"\ndim = 2\nw = [1.0]\ntheta = 0.0")
            .unwrap()
            .to_set()
            .unwrap_err();
        assert_eq!(err.status, crate::ExitStatus::InvalidInput);
    }

    #[test]
    fn signed_distance_flag() {
        let set = SetSpec::parse("kind = \"ball\"\ncenter = [0.0]\nradius = 1.0\nsigned_distance = false")
            .unwrap()
            .to_set()
            .unwrap();
        assert!(!set.has_signed_distance());
    }
}
