use std::collections::BTreeMap;

use super::{MultiIndex, RecurrenceTable};
use crate::error::{Error, Result};

/// Sparse expansion in the orthonormal tensorized Hermite basis.
///
/// Stored coefficients are never exactly zero, so two expansions are equal
/// iff their term maps are equal.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteExpansion {
    dim: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl HermiteExpansion {
    /// The zero expansion in `dim` variables.
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "expansion dimension must be positive");
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut e = Self::new(dim);
        e.add_term(MultiIndex::zero(dim), c);
        e
    }

    /// Builds an expansion from `(index, coefficient)` pairs; duplicate indices are summed.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, f64)>,
    {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let mut e = Self::new(dim);
        for (alpha, c) in terms {
            if alpha.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: alpha.dim(),
                });
            }
            e.add_term(alpha, c);
        }
        Ok(e)
    }

    /// One-dimensional expansion with `coeffs[n]` on `h_n`.
    pub fn from_dense_1d(coeffs: &[f64]) -> Self {
        let mut e = Self::new(1);
        for (n, &c) in coeffs.iter().enumerate() {
            e.add_term(MultiIndex::new(vec![n as u32]), c);
        }
        e
    }

    fn add_term(&mut self, alpha: MultiIndex, c: f64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(alpha) {
            Entry::Vacant(v) => {
                if c != 0.0 {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = *o.get() + c;
                if sum == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> f64 {
        self.terms.get(alpha).copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    /// Highest total degree among stored terms; `None` for the zero expansion.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::total_degree).max()
    }

    /// Dense coefficient vector of a one-dimensional expansion.
    pub fn dense_1d(&self) -> Option<Vec<f64>> {
        if self.dim != 1 {
            return None;
        }
        let len = self.degree().map_or(0, |d| d as usize + 1);
        let mut out = vec![0.0; len];
        for (alpha, c) in self.terms() {
            out[alpha.total_degree() as usize] = c;
        }
        Some(out)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let compiled = self.compile();
        let mut scratch = Vec::new();
        Ok(compiled.eval(x, &mut scratch))
    }

    /// Orthogonal projection onto total degree `≤ t`.
    pub fn truncate(&self, t: u32) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.total_degree() <= t)
                .map(|(k, &v)| (k.clone(), v))
                .collect(),
        }
    }

    /// Ornstein–Uhlenbeck operator `T_ρ`: scales the coefficient of `h_α` by `ρ^{|α|}`.
    pub fn ou_apply(&self, rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::RhoOutOfRange(rho));
        }
        let mut out = Self::new(self.dim);
        for (k, &v) in &self.terms {
            out.add_term(k.clone(), v * rho.powi(k.total_degree() as i32));
        }
        Ok(out)
    }

    /// `‖E‖_{L2(γ_d)}`, the Euclidean norm of the coefficients.
    pub fn l2_norm(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = Self::new(self.dim);
        for (k, &v) in &self.terms {
            out.add_term(k.clone(), v * factor);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut out = self.clone();
        for (k, &v) in &other.terms {
            out.add_term(k.clone(), sign * v);
        }
        Ok(out)
    }

    /// Re-expresses a one-dimensional expansion `Σ c_n h_n(u)` as a function of
    /// `u = ⟨w, x⟩` in `w.len()` variables, using
    /// `h_n(⟨w,x⟩) = Σ_{|α|=n} √(n!/α!) w^α h_α(x)` for unit `w`.
    pub fn along_direction(&self, w: &[f64]) -> Result<Self> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: self.dim,
            });
        }
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if w.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "direction must be a unit vector, norm is {norm}"
            )));
        }
        let dim = w.len();
        let mut out = Self::new(dim);
        let mut exps = vec![0u32; dim];
        for (alpha, c) in self.terms() {
            let n = alpha.total_degree();
            let half_ln_nfact = 0.5 * ln_factorial(n);
            direction_terms(w, 0, n, 0.0, 1.0, &mut exps, &mut |e, log_mag, sign| {
                let v = sign * (half_ln_nfact + log_mag).exp();
                out.add_term(MultiIndex::new(e.to_vec()), c * v);
            });
        }
        Ok(out)
    }

    pub fn compile(&self) -> CompiledExpansion {
        CompiledExpansion::new(self)
    }
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

// Enumerates α with |α| = remaining over coordinates pos.., carrying
// ln(|w^α| / √α!) and the sign of w^α.
fn direction_terms(
    w: &[f64],
    pos: usize,
    remaining: u32,
    log_mag: f64,
    sign: f64,
    exps: &mut [u32],
    emit: &mut dyn FnMut(&[u32], f64, f64),
) {
    let last = pos + 1 == w.len();
    let ks = if last { remaining..=remaining } else { 0..=remaining };
    for k in ks {
        if k > 0 && w[pos] == 0.0 {
            break;
        }
        let (lm, sg) = if k == 0 {
            (log_mag, sign)
        } else {
            let flip = w[pos] < 0.0 && k % 2 == 1;
            (
                log_mag + k as f64 * w[pos].abs().ln() - 0.5 * ln_factorial(k),
                if flip { -sign } else { sign },
            )
        };
        exps[pos] = k;
        if last {
            emit(exps, lm, sg);
        } else {
            direction_terms(w, pos + 1, remaining - k, lm, sg, exps, emit);
        }
    }
    exps[pos] = 0;
}

/// Evaluation form of an approximant.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalForm {
    /// `x ↦ E(x)`.
    Expansion(HermiteExpansion),
    /// `x ↦ ¼(1 + P(x))²`, non-negative in floating point.
    SquaredAffine(HermiteExpansion),
}

impl EvalForm {
    pub fn dim(&self) -> usize {
        self.inner().dim()
    }

    pub fn inner(&self) -> &HermiteExpansion {
        match self {
            EvalForm::Expansion(e) | EvalForm::SquaredAffine(e) => e,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let v = self.inner().eval(x)?;
        Ok(match self {
            EvalForm::Expansion(_) => v,
            EvalForm::SquaredAffine(_) => squared_affine(v),
        })
    }

    /// Total degree of the represented polynomial.
    pub fn degree(&self) -> Option<u32> {
        let d = self.inner().degree();
        match self {
            EvalForm::Expansion(_) => d,
            EvalForm::SquaredAffine(_) => Some(d.map_or(0, |d| 2 * d)),
        }
    }

    pub fn compile(&self) -> CompiledForm {
        CompiledForm {
            inner: self.inner().compile(),
            squared: matches!(self, EvalForm::SquaredAffine(_)),
        }
    }
}

#[inline]
fn squared_affine(v: f64) -> f64 {
    let s = 1.0 + v;
    0.25 * (s * s)
}

/// Flattened expansion for repeated pointwise evaluation.
#[derive(Debug, Clone)]
pub struct CompiledExpansion {
    dim: usize,
    layout: Layout,
    table: RecurrenceTable,
}

#[derive(Debug, Clone)]
enum Layout {
    Dense1d(Vec<f64>),
    Sparse {
        // offset of coordinate i's basis values inside the scratch buffer
        offsets: Vec<usize>,
        lens: Vec<usize>,
        exps: Vec<u32>,
        coeffs: Vec<f64>,
    },
}

impl CompiledExpansion {
    fn new(e: &HermiteExpansion) -> Self {
        let dim = e.dim();
        if dim == 1 {
            let dense = e.dense_1d().unwrap_or_default();
            return Self {
                dim,
                table: RecurrenceTable::new(dense.len()),
                layout: Layout::Dense1d(dense),
            };
        }
        let mut max_deg = vec![0usize; dim];
        let mut exps = Vec::with_capacity(e.len() * dim);
        let mut coeffs = Vec::with_capacity(e.len());
        for (alpha, c) in e.terms() {
            for (m, &k) in max_deg.iter_mut().zip(alpha.exponents()) {
                *m = (*m).max(k as usize);
            }
            exps.extend_from_slice(alpha.exponents());
            coeffs.push(c);
        }
        let lens: Vec<usize> = max_deg.iter().map(|m| m + 1).collect();
        let mut offsets = Vec::with_capacity(dim);
        let mut acc = 0;
        for &l in &lens {
            offsets.push(acc);
            acc += l;
        }
        let top = max_deg.iter().copied().max().unwrap_or(0);
        Self {
            dim,
            table: RecurrenceTable::new(top + 1),
            layout: Layout::Sparse {
                offsets,
                lens,
                exps,
                coeffs,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Evaluates at `x`; `scratch` is reused between calls. `x.len()` must equal `dim`.
    pub fn eval(&self, x: &[f64], scratch: &mut Vec<f64>) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.layout {
            Layout::Dense1d(c) => self.table.sum_series(c, x[0]),
            Layout::Sparse {
                offsets,
                lens,
                exps,
                coeffs,
            } => {
                let total: usize = lens.iter().sum();
                scratch.resize(total, 0.0);
                for i in 0..self.dim {
                    self.table
                        .fill(x[i], &mut scratch[offsets[i]..offsets[i] + lens[i]]);
                }
                let mut acc = 0.0;
                for (t, &c) in coeffs.iter().enumerate() {
                    let e = &exps[t * self.dim..(t + 1) * self.dim];
                    let mut prod = c;
                    for i in 0..self.dim {
                        prod *= scratch[offsets[i] + e[i] as usize];
                    }
                    acc += prod;
                }
                acc
            }
        }
    }
}

/// Compiled [`EvalForm`].
#[derive(Debug, Clone)]
pub struct CompiledForm {
    inner: CompiledExpansion,
    squared: bool,
}

impl CompiledForm {
    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn eval(&self, x: &[f64], scratch: &mut Vec<f64>) -> f64 {
        let v = self.inner.eval(x, scratch);
        if self.squared {
            squared_affine(v)
        } else {
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::hermite_eval;
    use approx::assert_relative_eq;

    fn e1(coeffs: &[(u32, f64)]) -> HermiteExpansion {
        HermiteExpansion::from_terms(1, coeffs.iter().map(|&(n, c)| (MultiIndex::new(vec![n]), c)))
            .unwrap()
    }

    #[test]
    fn empty_and_constant_eval() {
        let zero = HermiteExpansion::new(2);
        assert_eq!(zero.eval(&[0.3, -1.0]).unwrap(), 0.0);
        let c = HermiteExpansion::constant(3, 1.75);
        assert_eq!(c.eval(&[9.0, -2.0, 0.1]).unwrap(), 1.75);
        let sq = EvalForm::SquaredAffine(HermiteExpansion::new(1));
        assert_eq!(sq.eval(&[4.2]).unwrap(), 0.25);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let c = HermiteExpansion::constant(2, 1.0);
        assert_eq!(
            c.eval(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        );
        let bad = HermiteExpansion::from_terms(2, [(MultiIndex::new(vec![1]), 1.0)]);
        assert!(matches!(bad, Err(Error::DimensionMismatch { .. })));
        assert!(c.add(&HermiteExpansion::new(1)).is_err());
    }

    #[test]
    fn zero_coefficients_are_pruned() {
        let e = e1(&[(0, 1.0), (2, 0.0), (3, 0.5), (3, -0.5)]);
        assert_eq!(e.len(), 1);
        assert_eq!(e, HermiteExpansion::constant(1, 1.0));
    }

    #[test]
    fn truncate_examples() {
        let e = e1(&[(0, 1.0), (1, 0.5), (3, 0.2)]);
        assert_eq!(e.truncate(1), e1(&[(0, 1.0), (1, 0.5)]));
        assert_eq!(e.truncate(3), e);
        assert_eq!(e.truncate(0), HermiteExpansion::constant(1, 1.0));
        assert_eq!(e.truncate(1).truncate(1), e.truncate(1));
    }

    #[test]
    fn ou_examples() {
        let e = e1(&[(0, 1.0), (1, 0.5), (3, 0.2)]);
        assert_eq!(e.ou_apply(1.0).unwrap(), e);
        assert_eq!(e.ou_apply(0.0).unwrap(), HermiteExpansion::constant(1, 1.0));
        assert!(matches!(e.ou_apply(1.5), Err(Error::RhoOutOfRange(_))));
        assert!(matches!(e.ou_apply(-0.1), Err(Error::RhoOutOfRange(_))));
        let twice = e.ou_apply(0.5).unwrap().ou_apply(0.5).unwrap();
        let once = e.ou_apply(0.25).unwrap();
        for (k, v) in once.terms() {
            assert!((twice.coeff(k) - v).abs() <= 1e-12);
        }
    }

    #[test]
    fn l2_norm_examples() {
        assert_eq!(HermiteExpansion::new(1).l2_norm(), 0.0);
        let pyth = HermiteExpansion::from_terms(
            2,
            [
                (MultiIndex::new(vec![1, 0]), 3.0),
                (MultiIndex::new(vec![0, 2]), 4.0),
            ],
        )
        .unwrap();
        assert_eq!(pyth.l2_norm(), 5.0);
        assert_relative_eq!(e1(&[(0, 0.5), (1, -0.5)]).l2_norm(), 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn sparse_eval_matches_product_formula() {
        let e = HermiteExpansion::from_terms(
            2,
            [
                (MultiIndex::new(vec![0, 0]), 0.3),
                (MultiIndex::new(vec![2, 1]), -1.2),
                (MultiIndex::new(vec![0, 4]), 0.7),
            ],
        )
        .unwrap();
        let x = [0.4, -1.3];
        let expect = 0.3 - 1.2 * hermite_eval(2, x[0]) * hermite_eval(1, x[1])
            + 0.7 * hermite_eval(4, x[1]);
        assert_relative_eq!(e.eval(&x).unwrap(), expect, epsilon = 1e-14);
    }

    #[test]
    fn squared_affine_degree_and_value() {
        let p = e1(&[(0, 0.1), (3, -0.4)]);
        let q = EvalForm::SquaredAffine(p.clone());
        assert_eq!(q.degree(), Some(6));
        let x = [1.7];
        let pv = p.eval(&x).unwrap();
        assert_relative_eq!(q.eval(&x).unwrap(), 0.25 * (1.0 + pv).powi(2), epsilon = 1e-15);
    }

    #[test]
    fn direction_embedding_matches_pointwise() {
        let p = e1(&[(0, 0.2), (1, -0.7), (2, 0.3), (5, 0.05), (8, -0.01)]);
        let raw = [0.3, -0.5, 0.8];
        let n = raw.iter().map(|v: &f64| v * v).sum::<f64>().sqrt();
        let w: Vec<f64> = raw.iter().map(|v| v / n).collect();
        let lifted = p.along_direction(&w).unwrap();
        assert_eq!(lifted.degree(), Some(8));
        assert_relative_eq!(lifted.l2_norm(), p.l2_norm(), max_relative = 1e-12);
        for x in [[0.1, 0.2, 0.3], [-1.5, 0.4, 2.0], [2.2, -0.9, -0.1]] {
            let u: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum();
            assert_relative_eq!(
                lifted.eval(&x).unwrap(),
                p.eval(&[u]).unwrap(),
                max_relative = 1e-11,
                epsilon = 1e-12
            );
        }
        let flipped = p.along_direction(&[-1.0]).unwrap();
        assert_relative_eq!(flipped.eval(&[0.6]).unwrap(), p.eval(&[-0.6]).unwrap(), epsilon = 1e-14);
        assert!(p.along_direction(&[1.0, 1.0]).is_err());
    }
}
