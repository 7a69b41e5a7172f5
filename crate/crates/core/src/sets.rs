//! Measurable sets `H ⊆ R^d`, the signed function `f = 2·1_H − 1`, and
//! Gaussian surface area.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::rng::{fill_gaussian, par_chunks, Purpose};
use crate::stats::normal_pdf;

/// `{x : ⟨w, x⟩ ≤ θ}` with unit normal `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    w: Vec<f64>,
    theta: f64,
}

impl Halfspace {
    /// Normalizes `w` and rescales `θ` so the set is unchanged.
    pub fn new(w: Vec<f64>, theta: f64) -> Result<Self> {
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if w.is_empty() || !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidParameter(
                "halfspace normal must be a finite nonzero vector".into(),
            ));
        }
        if theta.is_nan() {
            return Err(Error::InvalidParameter("halfspace threshold is NaN".into()));
        }
        Ok(Self {
            w: w.iter().map(|v| v / norm).collect(),
            theta: theta / norm,
        })
    }

    pub fn normal(&self) -> &[f64] {
        &self.w
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    fn margin(&self, x: &[f64]) -> f64 {
        self.theta - dot(&self.w, x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetKind {
    Halfspace(Halfspace),
    Intersection(Vec<Halfspace>),
    Ball { center: Vec<f64>, radius: f64 },
    /// One-dimensional union of disjoint, sorted closed intervals.
    IntervalUnion(Vec<(f64, f64)>),
    Full,
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConceptSet {
    dim: usize,
    kind: SetKind,
    signed_distance: bool,
}

/// A set that depends on `x` only through `u = ⟨w, x⟩` and is a finite union
/// of intervals in `u`, or a set whose indicator is constant.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactProfile {
    Constant(f64),
    Directional {
        direction: Vec<f64>,
        intervals: Vec<(f64, f64)>,
    },
}

impl ConceptSet {
    pub fn halfspace(w: Vec<f64>, theta: f64) -> Result<Self> {
        let h = Halfspace::new(w, theta)?;
        Ok(Self {
            dim: h.w.len(),
            kind: SetKind::Halfspace(h),
            signed_distance: true,
        })
    }

    pub fn intersection(halfspaces: Vec<Halfspace>) -> Result<Self> {
        let dim = halfspaces
            .first()
            .map(|h| h.w.len())
            .ok_or_else(|| Error::InvalidParameter("intersection needs at least one halfspace".into()))?;
        if let Some(h) = halfspaces.iter().find(|h| h.w.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: h.w.len(),
            });
        }
        Ok(Self {
            dim,
            kind: SetKind::Intersection(halfspaces),
            signed_distance: true,
        })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("ball center must be a finite point".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            dim: center.len(),
            kind: SetKind::Ball { center, radius },
            signed_distance: true,
        })
    }

    pub fn interval_union(intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if a.is_nan() || b.is_nan() || a > b {
                return Err(Error::InvalidParameter(format!("malformed interval [{a}, {b}]")));
            }
        }
        if intervals.windows(2).any(|w| w[0].1 >= w[1].0) {
            return Err(Error::InvalidParameter(
                "intervals must be sorted and pairwise disjoint".into(),
            ));
        }
        Ok(Self {
            dim: 1,
            kind: SetKind::IntervalUnion(intervals),
            signed_distance: true,
        })
    }

    pub fn full(dim: usize) -> Self {
        assert!(dim > 0);
        Self {
            dim,
            kind: SetKind::Full,
            signed_distance: true,
        }
    }

    pub fn empty(dim: usize) -> Self {
        assert!(dim > 0);
        Self {
            dim,
            kind: SetKind::Empty,
            signed_distance: true,
        }
    }

    /// Disables the signed-distance capability; thickening estimates are then refused.
    pub fn without_signed_distance(mut self) -> Self {
        self.signed_distance = false;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn has_signed_distance(&self) -> bool {
        self.signed_distance
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `1_H(x)`.
    pub fn membership(&self, x: &[f64]) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.contains(x))
    }

    /// `f(x) = 2·1_H(x) − 1`.
    pub fn signed_f(&self, x: &[f64]) -> Result<f64> {
        Ok(if self.membership(x)? { 1.0 } else { -1.0 })
    }

    /// Membership without the dimension check; `x.len()` must equal `dim()`.
    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.kind {
            SetKind::Halfspace(h) => h.margin(x) >= 0.0,
            SetKind::Intersection(hs) => hs.iter().all(|h| h.margin(x) >= 0.0),
            SetKind::Ball { center, radius } => dist2(center, x) <= radius * radius,
            SetKind::IntervalUnion(iv) => iv.iter().any(|&(a, b)| a <= x[0] && x[0] <= b),
            SetKind::Full => true,
            SetKind::Empty => false,
        }
    }

    /// Signed distance to the boundary, positive inside. Intersections use
    /// the minimum constituent margin, which is exact away from edges.
    pub fn signed_distance(&self, x: &[f64]) -> Option<f64> {
        if !self.signed_distance {
            return None;
        }
        Some(match &self.kind {
            SetKind::Halfspace(h) => h.margin(x),
            SetKind::Intersection(hs) => hs
                .iter()
                .map(|h| h.margin(x))
                .fold(f64::INFINITY, f64::min),
            SetKind::Ball { center, radius } => radius - dist2(center, x).sqrt(),
            SetKind::IntervalUnion(iv) => interval_signed_distance(iv, x[0]),
            SetKind::Full => f64::INFINITY,
            SetKind::Empty => f64::NEG_INFINITY,
        })
    }

    /// Closed-form Gaussian surface area where one is known.
    pub fn closed_form_gsa(&self) -> Option<f64> {
        match &self.kind {
            SetKind::Halfspace(h) => Some(normal_pdf(h.theta)),
            SetKind::Intersection(hs) if hs.len() == 1 => Some(normal_pdf(hs[0].theta)),
            SetKind::Intersection(_) => None,
            SetKind::Ball { center, radius } => center
                .iter()
                .all(|&c| c == 0.0)
                .then(|| centered_ball_gsa(self.dim, *radius)),
            SetKind::IntervalUnion(iv) => Some(
                iv.iter()
                    .flat_map(|&(a, b)| [a, b])
                    .filter(|e| e.is_finite())
                    .map(normal_pdf)
                    .sum(),
            ),
            SetKind::Full | SetKind::Empty => Some(0.0),
        }
    }

    pub fn gsa(&self, request: &GsaRequest) -> Result<GsaEstimate> {
        match request.method {
            GsaMethod::ClosedForm => self.closed_form_gsa().map(GsaEstimate::closed_form).ok_or_else(|| {
                Error::InvalidParameter(format!("no closed-form GSA for {}", self.describe()))
            }),
            GsaMethod::Thickening => self.thickening_gsa(request),
            GsaMethod::Auto => match self.closed_form_gsa() {
                Some(v) => Ok(GsaEstimate::closed_form(v)),
                None => self.thickening_gsa(request),
            },
        }
    }

    /// `γ_d{|dist(x, ∂H)| ≤ δ} / (2δ)` per δ, extrapolated linearly to δ → 0.
    pub fn thickening_gsa(&self, request: &GsaRequest) -> Result<GsaEstimate> {
        if !self.signed_distance {
            return Err(Error::NoSignedDistance(self.describe()));
        }
        if request.samples == 0 {
            return Err(Error::InvalidParameter("sample budget must be positive".into()));
        }
        if request.deltas.is_empty() || request.deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::InvalidParameter("delta list must be non-empty and positive".into()));
        }
        let n = request.samples;
        let mut points = Vec::with_capacity(request.deltas.len());
        for (i, &delta) in request.deltas.iter().enumerate() {
            let counts = par_chunks(request.seed, Purpose::Thickening, i as u16, n, |rng, len| {
                let mut x = vec![0.0; self.dim];
                let mut hits = 0u64;
                for _ in 0..len {
                    fill_gaussian(rng, &mut x);
                    let sd = self.signed_distance(&x).expect("capability checked");
                    if sd.abs() <= delta {
                        hits += 1;
                    }
                }
                hits
            });
            let frac = counts.iter().sum::<u64>() as f64 / n as f64;
            let value = frac / (2.0 * delta);
            let var = frac * (1.0 - frac) / n as f64 / (4.0 * delta * delta);
            points.push((delta, value, var));
        }
        let (value, var) = if points.len() == 1 {
            (points[0].1, points[0].2)
        } else {
            let k = points.len() as f64;
            let mean_d = points.iter().map(|p| p.0).sum::<f64>() / k;
            let sxx: f64 = points.iter().map(|p| (p.0 - mean_d).powi(2)).sum();
            if sxx == 0.0 {
                return Err(Error::InvalidParameter("delta list needs distinct values".into()));
            }
            // intercept = Σ l_i·y_i with l_i = 1/k − mean_d·(δ_i − mean_d)/Sxx
            points.iter().fold((0.0, 0.0), |(v, s2), &(d, y, var)| {
                let l = 1.0 / k - mean_d * (d - mean_d) / sxx;
                (v + l * y, s2 + l * l * var)
            })
        };
        Ok(GsaEstimate {
            value: value.max(0.0),
            std_error: var.sqrt(),
            method: GsaMethod::Thickening.into(),
        })
    }

    /// The set's indicator as a union of intervals along one direction, when available.
    pub fn exact_profile(&self) -> Option<ExactProfile> {
        let directional = |direction: Vec<f64>, intervals| ExactProfile::Directional {
            direction,
            intervals,
        };
        match &self.kind {
            SetKind::Halfspace(h) => Some(directional(h.w.clone(), vec![(f64::NEG_INFINITY, h.theta)])),
            SetKind::Intersection(hs) if hs.len() == 1 => {
                Some(directional(hs[0].w.clone(), vec![(f64::NEG_INFINITY, hs[0].theta)]))
            }
            SetKind::IntervalUnion(iv) => Some(directional(vec![1.0], iv.clone())),
            SetKind::Ball { center, radius } if self.dim == 1 => {
                Some(directional(vec![1.0], vec![(center[0] - radius, center[0] + radius)]))
            }
            SetKind::Full => Some(ExactProfile::Constant(1.0)),
            SetKind::Empty => Some(ExactProfile::Constant(-1.0)),
            _ => None,
        }
    }

    /// Short human-readable descriptor used in reports and CSV rows.
    pub fn describe(&self) -> String {
        let fmt = |v: &[f64]| {
            v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(";")
        };
        match &self.kind {
            SetKind::Halfspace(h) => format!("halfspace(d={},w=[{}],theta={})", self.dim, fmt(&h.w), h.theta),
            SetKind::Intersection(hs) => format!("intersection(d={},m={})", self.dim, hs.len()),
            SetKind::Ball { center, radius } => {
                format!("ball(d={},center=[{}],radius={})", self.dim, fmt(center), radius)
            }
            SetKind::IntervalUnion(iv) => format!(
                "interval_union({})",
                iv.iter().map(|(a, b)| format!("[{a},{b}]")).collect::<Vec<_>>().join(";")
            ),
            SetKind::Full => format!("full(d={})", self.dim),
            SetKind::Empty => format!("empty(d={})", self.dim),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn interval_signed_distance(iv: &[(f64, f64)], x: f64) -> f64 {
    let mut outside = f64::INFINITY;
    for &(a, b) in iv {
        if a <= x && x <= b {
            return (x - a).min(b - x);
        }
        outside = outside.min((a - x).abs()).min((x - b).abs());
    }
    -outside
}

/// GSA of the radius-`r` ball centered at the origin:
/// `r^{d−1}·e^{−r²/2}·2π^{d/2} / (Γ(d/2)·(2π)^{d/2})`.
pub fn centered_ball_gsa(dim: usize, radius: f64) -> f64 {
    let d = dim as f64;
    radius.powf(d - 1.0) * (-0.5 * radius * radius).exp() * 2.0 * PI.powf(d / 2.0)
        / (gamma(d / 2.0) * (2.0 * PI).powf(d / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GsaMethod {
    Auto,
    ClosedForm,
    Thickening,
}

/// Where a Γ value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GsaSource {
    ClosedForm,
    Thickening,
    ClassBound,
    Supplied,
}

impl From<GsaMethod> for GsaSource {
    fn from(m: GsaMethod) -> Self {
        match m {
            GsaMethod::Thickening => GsaSource::Thickening,
            GsaMethod::ClosedForm | GsaMethod::Auto => GsaSource::ClosedForm,
        }
    }
}

impl GsaSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            GsaSource::ClosedForm => "closed_form",
            GsaSource::Thickening => "thickening",
            GsaSource::ClassBound => "class_bound",
            GsaSource::Supplied => "supplied",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GsaEstimate {
    pub value: f64,
    pub std_error: f64,
    pub method: GsaSource,
}

impl GsaEstimate {
    pub fn closed_form(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            method: GsaSource::ClosedForm,
        }
    }

    pub fn class_bound(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            method: GsaSource::ClassBound,
        }
    }

    pub fn supplied(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            method: GsaSource::Supplied,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GsaRequest {
    pub method: GsaMethod,
    pub deltas: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
}

impl Default for GsaRequest {
    fn default() -> Self {
        Self {
            method: GsaMethod::Auto,
            deltas: vec![0.1, 0.05, 0.025],
            samples: 1_000_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassBound {
    /// Intersections of `m` halfspaces: `max(√(ln m), 1/√(2π))`.
    Intersection(u32),
    /// Convex sets in `d` dimensions: `d^{1/4}`.
    Convex(u32),
}

/// Order-of-magnitude GSA bound for a class, with unit constant.
pub fn gsa_class_bound(class: ClassBound) -> f64 {
    match class {
        ClassBound::Intersection(m) => (m.max(1) as f64).ln().sqrt().max(normal_pdf(0.0)),
        ClassBound::Convex(d) => (d.max(1) as f64).powf(0.25),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn membership_examples() {
        let h = ConceptSet::halfspace(vec![1.0, 0.0], 0.0).unwrap();
        assert!(h.membership(&[-1.0, 0.0]).unwrap());
        let b = ConceptSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!(!b.membership(&[2.0, 0.0]).unwrap());
        let i = ConceptSet::intersection(vec![
            Halfspace::new(vec![1.0, 0.0], 0.0).unwrap(),
            Halfspace::new(vec![0.0, 1.0], 0.0).unwrap(),
        ])
        .unwrap();
        assert!(!i.membership(&[-1.0, 1.0]).unwrap());
        assert!(i.membership(&[-1.0, -1.0]).unwrap());
        assert!(matches!(h.membership(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn signed_f_values() {
        let h = ConceptSet::halfspace(vec![1.0], 0.5).unwrap();
        assert_eq!(h.signed_f(&[0.0]).unwrap(), 1.0);
        assert_eq!(h.signed_f(&[1.0]).unwrap(), -1.0);
    }

    #[test]
    fn builders_normalize_and_validate() {
        let h = Halfspace::new(vec![3.0, 4.0], 5.0).unwrap();
        assert_relative_eq!(h.normal()[0], 0.6, epsilon = 1e-15);
        assert_relative_eq!(h.theta(), 1.0, epsilon = 1e-15);
        let norm: f64 = h.normal().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() <= 1e-12);
        assert!(Halfspace::new(vec![0.0, 0.0], 1.0).is_err());
        assert!(ConceptSet::ball(vec![0.0], 0.0).is_err());
        assert!(ConceptSet::interval_union(vec![(0.0, 2.0), (1.0, 3.0)]).is_err());
        assert!(ConceptSet::interval_union(vec![(2.0, 3.0), (0.0, 1.0)]).is_err());
        assert!(ConceptSet::interval_union(vec![(1.0, 0.0)]).is_err());
        assert!(ConceptSet::intersection(vec![]).is_err());
    }

    #[test]
    fn signed_distances() {
        let b = ConceptSet::ball(vec![1.0, 0.0], 2.0).unwrap();
        assert_relative_eq!(b.signed_distance(&[1.0, 0.0]).unwrap(), 2.0);
        assert_relative_eq!(b.signed_distance(&[4.0, 0.0]).unwrap(), -1.0);
        let iv = ConceptSet::interval_union(vec![(0.0, 1.0), (3.0, f64::INFINITY)]).unwrap();
        assert_relative_eq!(iv.signed_distance(&[0.25]).unwrap(), 0.25);
        assert_relative_eq!(iv.signed_distance(&[2.5]).unwrap(), -0.5);
        assert_relative_eq!(iv.signed_distance(&[-1.0]).unwrap(), -1.0);
        assert_relative_eq!(iv.signed_distance(&[10.0]).unwrap(), 7.0);
        assert_eq!(ConceptSet::full(2).without_signed_distance().signed_distance(&[0.0, 0.0]), None);
    }

    #[test]
    fn closed_form_values() {
        let h0 = ConceptSet::halfspace(vec![1.0], 0.0).unwrap();
        assert_relative_eq!(h0.closed_form_gsa().unwrap(), 0.398_942_280_401_432_7, epsilon = 1e-15);
        let h3 = ConceptSet::halfspace(vec![1.0], 3.0).unwrap();
        assert_relative_eq!(h3.closed_form_gsa().unwrap(), 0.004_431_848_411_938_008, epsilon = 1e-15);
        let far = ConceptSet::halfspace(vec![1.0], 40.0).unwrap();
        assert!(far.closed_form_gsa().unwrap() < 1e-300);
        let ball = ConceptSet::ball(vec![0.0], 1.0).unwrap();
        assert_relative_eq!(ball.closed_form_gsa().unwrap(), 2.0 * normal_pdf(1.0), epsilon = 1e-15);
        assert_relative_eq!(ball.closed_form_gsa().unwrap(), 0.483_941_449_038_286_7, epsilon = 1e-12);
        assert_eq!(ConceptSet::full(3).closed_form_gsa(), Some(0.0));
        assert_eq!(ConceptSet::ball(vec![1.0, 0.0], 1.0).unwrap().closed_form_gsa(), None);
    }

    #[test]
    fn halfspace_gsa_peaks_at_zero() {
        let vals: Vec<f64> = [-2.0, -1.0, 0.0, 1.0, 2.0]
            .iter()
            .map(|&t| ConceptSet::halfspace(vec![1.0], t).unwrap().closed_form_gsa().unwrap())
            .collect();
        let max = vals.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(max, vals[2]);
    }

    #[test]
    fn class_bounds() {
        assert_relative_eq!(gsa_class_bound(ClassBound::Intersection(1)), 0.398_942_280_401_432_7);
        assert_relative_eq!(gsa_class_bound(ClassBound::Intersection(2)), 2f64.ln().sqrt());
        assert_relative_eq!(gsa_class_bound(ClassBound::Convex(16)), 2.0);
    }

    #[test]
    fn thickening_refusals() {
        let h = ConceptSet::halfspace(vec![1.0], 0.0).unwrap();
        let mut req = GsaRequest {
            method: GsaMethod::Thickening,
            samples: 0,
            ..GsaRequest::default()
        };
        assert!(matches!(h.gsa(&req), Err(Error::InvalidParameter(_))));
        req.samples = 1000;
        assert!(matches!(
            h.clone().without_signed_distance().gsa(&req),
            Err(Error::NoSignedDistance(_))
        ));
        req.deltas = vec![];
        assert!(h.gsa(&req).is_err());
    }
}
