//! JSON polynomial documents.
//!
//! Coefficients are written as JSON numbers in shortest round-trip form and
//! parsed with exact decimal-to-binary conversion, so a save/load cycle
//! reproduces every coefficient bit for bit.

use std::path::Path;

use nonneg_approx::construction::{ConstructionParams, Diagnostics, NonNegApprox};
use nonneg_approx::{EvalForm, HermiteExpansion, MultiIndex};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;
pub const BASIS: &str = "hermite-probabilists-orthonormal";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// The terms are the polynomial itself.
    Expansion,
    /// The terms are `p` and the polynomial is `¼(1 + p)²`.
    SquaredAffine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub alpha: Vec<u32>,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialDocument {
    pub format_version: u32,
    pub dim: usize,
    pub basis: String,
    pub representation: Representation,
    pub terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ConstructionParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

impl PolynomialDocument {
    pub fn from_form(form: &EvalForm) -> Self {
        let (representation, inner) = match form {
            EvalForm::Expansion(e) => (Representation::Expansion, e),
            EvalForm::SquaredAffine(p) => (Representation::SquaredAffine, p),
        };
        Self {
            format_version: FORMAT_VERSION,
            dim: inner.dim(),
            basis: BASIS.to_string(),
            representation,
            terms: inner
                .terms()
                .map(|(a, c)| Term {
                    alpha: a.exponents().to_vec(),
                    coeff: c,
                })
                .collect(),
            params: None,
            diagnostics: None,
        }
    }

    pub fn from_approx(approx: &NonNegApprox) -> Self {
        Self {
            params: Some(approx.params),
            diagnostics: Some(approx.diagnostics.clone()),
            ..Self::from_form(&approx.q_form)
        }
    }

    pub fn to_form(&self) -> Result<EvalForm, CliError> {
        let terms = self.terms.iter().map(|t| {
            if t.alpha.len() != self.dim {
                return Err(CliError::invalid(format!(
                    "term {:?} has {} exponents, document dim is {}",
                    t.alpha,
                    t.alpha.len(),
                    self.dim
                )));
            }
            Ok((MultiIndex::new(t.alpha.clone()), t.coeff))
        });
        let terms = terms.collect::<Result<Vec<_>, _>>()?;
        let e = HermiteExpansion::from_terms(self.dim, terms)?;
        Ok(match self.representation {
            Representation::Expansion => EvalForm::Expansion(e),
            Representation::SquaredAffine => EvalForm::SquaredAffine(e),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::invalid(format!("bad polynomial document: {e}")))?;
        match raw.get("format_version").and_then(|v| v.as_u64()) {
            Some(v) if v == FORMAT_VERSION as u64 => {}
            Some(v) => {
                return Err(CliError::invalid(format!(
                    "unsupported format_version {v}; this build reads version {FORMAT_VERSION}"
                )))
            }
            None => return Err(CliError::invalid("polynomial document lacks format_version")),
        }
        let doc: Self =
            serde_json::from_str(text).map_err(|e| CliError::invalid(format!("bad polynomial document: {e}")))?;
        if doc.basis != BASIS {
            return Err(CliError::invalid(format!("unsupported basis {:?}, expected {BASIS:?}", doc.basis)));
        }
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("cannot read polynomial {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json())
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
    }
}
