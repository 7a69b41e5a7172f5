//! Empirical and exact checks of the approximation contract and of each
//! inequality in the error bound for `q = ¼(1 + p)²`.
//!
//! `g = T_ρ f` is never estimated by nested sampling. Checks that need `g`
//! pointwise run on sets with an [`ExactProfile`], where `g` is a 1-D series in
//! `u = ⟨w, x⟩` truncated at a reference degree whose L2 tail `ρ^{T+1}` is
//! certified below [`REFERENCE_TAIL_TOLERANCE`].

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::construction::{exact_coeffs_intervals_1d, ConstructionParams, NonNegApprox};
use crate::error::{Error, Result};
use crate::hermite::{CompiledForm, EvalForm, HermiteExpansion, RecurrenceTable};
use crate::rng::{fill_gaussian, par_chunks, Purpose};
use crate::sets::{ConceptSet, ExactProfile};
use crate::stats::{ErrorEstimate, MeanAccumulator};

/// Fewer samples than this are refused for confidence reporting.
pub const MIN_SAMPLES: u64 = 1_000;

/// Certified bound required on `‖g − g_T‖₂` for the reference series.
pub const REFERENCE_TAIL_TOLERANCE: f64 = 1e-8;

/// Largest reference degree we are willing to evaluate.
pub const MAX_REFERENCE_DEGREE: u32 = 50_000;

/// Half-width of the deterministic far-tail grid used by the non-negativity check.
pub const TAIL_GRID_RADIUS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    HoldsWithinCi,
    Violated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::HoldsWithinCi => "holds_within_ci",
            Verdict::Violated => "violated",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lhs {
    Exact(f64),
    Estimate(ErrorEstimate),
}

impl Lhs {
    pub fn value(&self) -> f64 {
        match self {
            Lhs::Exact(v) => *v,
            Lhs::Estimate(e) => e.mean,
        }
    }
}

/// One inequality `lhs ≤ rhs` with a three-state verdict.
///
/// `slack` is the known bound on how far the computed left-hand side may be
/// from the true one (reference-series truncation); it widens the interval on
/// both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: Lhs,
    pub rhs: f64,
    pub slack: f64,
    pub verdict: Verdict,
}

impl BoundCheck {
    pub fn exact(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::new(name, Lhs::Exact(lhs), rhs, 0.0)
    }

    pub fn estimated(name: impl Into<String>, lhs: ErrorEstimate, rhs: f64) -> Self {
        Self::new(name, Lhs::Estimate(lhs), rhs, 0.0)
    }

    pub fn new(name: impl Into<String>, lhs: Lhs, rhs: f64, slack: f64) -> Self {
        let (lo, hi) = match lhs {
            Lhs::Exact(v) => (v, v),
            Lhs::Estimate(e) => (e.lower(), e.upper()),
        };
        let verdict = if hi + slack <= rhs {
            Verdict::Holds
        } else if lo - slack > rhs {
            Verdict::Violated
        } else {
            Verdict::HoldsWithinCi
        };
        Self {
            name: name.into(),
            lhs,
            rhs,
            slack,
            verdict,
        }
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }
}

fn require_samples(n: u64) -> Result<()> {
    if n < MIN_SAMPLES {
        Err(Error::TooFewSamples { n, min: MIN_SAMPLES })
    } else {
        Ok(())
    }
}

/// Monte Carlo estimate of `E_{γ_d} |approx(x) − 1_H(x)|`.
pub fn l1_error(approx: &EvalForm, set: &ConceptSet, n: u64, seed: u64) -> Result<ErrorEstimate> {
    require_samples(n)?;
    if approx.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: approx.dim(),
        });
    }
    let compiled = approx.compile();
    let dim = set.dim();
    let parts = par_chunks(seed, Purpose::L1Error, 0, n, |rng, len| {
        let mut acc = MeanAccumulator::default();
        let mut x = vec![0.0; dim];
        let mut scratch = Vec::new();
        for _ in 0..len {
            fill_gaussian(rng, &mut x);
            let h = if set.contains(&x) { 1.0 } else { 0.0 };
            acc.push((compiled.eval(&x, &mut scratch) - h).abs());
        }
        acc
    });
    Ok(merge(&parts).estimate(ErrorEstimate::DEFAULT_CONFIDENCE))
}

fn merge(parts: &[MeanAccumulator]) -> MeanAccumulator {
    parts.iter().fold(MeanAccumulator::default(), |mut a, p| {
        a.merge(p);
        a
    })
}

/// Definition contract: L1 error at most `ε` and non-negativity.
pub fn check_definition(
    approx: &NonNegApprox,
    set: &ConceptSet,
    epsilon: f64,
    n: u64,
    seed: u64,
) -> Result<Vec<BoundCheck>> {
    check_definition_form(&approx.q_form, set, epsilon, n, seed)
}

/// Same contract for a bare polynomial, without construction metadata.
pub fn check_definition_form(
    form: &EvalForm,
    set: &ConceptSet,
    epsilon: f64,
    n: u64,
    seed: u64,
) -> Result<Vec<BoundCheck>> {
    let l1 = l1_error(form, set, n, seed)?;
    Ok(vec![
        BoundCheck::estimated("L1 error: E|q - 1_H| <= epsilon", l1, epsilon),
        check_nonnegativity(form, n, seed)?,
    ])
}

/// Deterministic points with coordinates up to `±TAIL_GRID_RADIUS`: every
/// axis, the main diagonal, and for `d ≤ 3` a full coarse grid.
pub fn tail_grid(dim: usize) -> Vec<Vec<f64>> {
    let steps: Vec<f64> = (-32..=32).map(|k| k as f64 * TAIL_GRID_RADIUS / 32.0).collect();
    let mut pts = Vec::new();
    for axis in 0..dim {
        for &s in &steps {
            let mut x = vec![0.0; dim];
            x[axis] = s;
            pts.push(x);
        }
    }
    if dim > 1 {
        for &s in &steps {
            pts.push(vec![s; dim]);
        }
    }
    if (2..=3).contains(&dim) {
        let coarse: Vec<f64> = (-4..=4).map(|k| k as f64 * TAIL_GRID_RADIUS / 4.0).collect();
        let mut idx = vec![0usize; dim];
        'outer: loop {
            pts.push(idx.iter().map(|&i| coarse[i]).collect());
            for i in idx.iter_mut() {
                *i += 1;
                if *i < coarse.len() {
                    continue 'outer;
                }
                *i = 0;
            }
            break;
        }
    }
    pts
}

/// Smallest value of `form` over `n` Gaussian samples and the tail grid.
pub fn minimum_value(form: &EvalForm, n: u64, seed: u64) -> f64 {
    let compiled = form.compile();
    let dim = form.dim();
    let sampled = par_chunks(seed, Purpose::Nonnegativity, 0, n, |rng, len| {
        let mut x = vec![0.0; dim];
        let mut scratch = Vec::new();
        let mut m = f64::INFINITY;
        for _ in 0..len {
            fill_gaussian(rng, &mut x);
            m = m.min(compiled.eval(&x, &mut scratch));
        }
        m
    });
    let mut scratch = Vec::new();
    tail_grid(dim)
        .iter()
        .map(|x| compiled.eval(x, &mut scratch))
        .chain(sampled)
        .fold(f64::INFINITY, f64::min)
}

/// Pointwise non-negativity of `form`: `lhs = −min q`, holds iff `min q ≥ 0`.
pub fn check_nonnegativity(form: &EvalForm, n: u64, seed: u64) -> Result<BoundCheck> {
    let min = minimum_value(form, n, seed);
    Ok(BoundCheck::exact("non-negativity: -min q <= 0", -min, 0.0))
}

/// Smallest reference degree `T ≥ min_degree` with `ρ^{T+1} ≤ REFERENCE_TAIL_TOLERANCE`.
pub fn reference_degree(rho: f64, min_degree: u32) -> Result<u32> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::RhoOutOfRange(rho));
    }
    if rho == 0.0 || rho == 1.0 {
        return Ok(min_degree);
    }
    let needed = (REFERENCE_TAIL_TOLERANCE.ln() / rho.ln()).ceil().max(1.0) - 1.0;
    if needed > MAX_REFERENCE_DEGREE as f64 {
        return Err(Error::TailTooLarge {
            tail: rho.powi(MAX_REFERENCE_DEGREE as i32 + 1),
            tolerance: REFERENCE_TAIL_TOLERANCE,
        });
    }
    let mut t = (needed as u32).max(min_degree);
    while rho.powi(t as i32 + 1) > REFERENCE_TAIL_TOLERANCE {
        t += 1;
    }
    Ok(t)
}

/// A set reduced to one dimension: `f` depends on `u = ⟨w, x⟩ ~ γ_1` only.
struct Profile1d {
    intervals: Vec<(f64, f64)>,
    constant: Option<f64>,
}

impl Profile1d {
    fn of(set: &ConceptSet) -> Result<Self> {
        match set.exact_profile() {
            Some(ExactProfile::Constant(c)) => Ok(Self {
                intervals: vec![],
                constant: Some(c),
            }),
            Some(ExactProfile::Directional { intervals, .. }) => Ok(Self {
                intervals,
                constant: None,
            }),
            None => Err(Error::NoExactPath(set.describe())),
        }
    }

    fn f(&self, u: f64) -> f64 {
        match self.constant {
            Some(c) => c,
            None if self.intervals.iter().any(|&(a, b)| a <= u && u <= b) => 1.0,
            None => -1.0,
        }
    }

    fn coeffs(&self, degree: u32) -> HermiteExpansion {
        match self.constant {
            Some(c) => HermiteExpansion::constant(1, c),
            None => exact_coeffs_intervals_1d(&self.intervals, degree),
        }
    }
}

/// `g = T_ρ f` on the 1-D profile: exact `f` at `ρ = 1`, otherwise the
/// degree-`T` series with certified L2 tail `ρ^{T+1}`.
struct SmoothedReference {
    rho: f64,
    dense: Vec<f64>,
    table: RecurrenceTable,
    tail: f64,
    /// `‖g‖₂²` (exact at ρ = 1, lower bound within `tail²` otherwise)
    norm2: f64,
    f_coeffs: HermiteExpansion,
}

impl SmoothedReference {
    fn new(profile: &Profile1d, rho: f64, degree: u32) -> Result<Self> {
        let tail = if rho == 1.0 { 0.0 } else { rho.powi(degree as i32 + 1) };
        if tail > REFERENCE_TAIL_TOLERANCE {
            return Err(Error::TailTooLarge {
                tail,
                tolerance: REFERENCE_TAIL_TOLERANCE,
            });
        }
        let f_coeffs = profile.coeffs(degree);
        let g = f_coeffs.ou_apply(rho)?;
        let dense = g.dense_1d().expect("one-dimensional");
        let norm2 = if rho == 1.0 && profile.constant.is_none() {
            1.0
        } else {
            g.l2_norm().powi(2)
        };
        Ok(Self {
            rho,
            table: RecurrenceTable::new(dense.len()),
            dense,
            tail,
            norm2,
            f_coeffs,
        })
    }

    fn eval(&self, profile: &Profile1d, u: f64) -> f64 {
        if self.rho == 1.0 {
            profile.f(u)
        } else {
            self.table.sum_series(&self.dense, u)
        }
    }
}

/// Estimates `E|f − g|` on the profile, drawing `u ~ γ_1`.
fn smoothing_distance(
    profile: &Profile1d,
    reference: &SmoothedReference,
    n: u64,
    seed: u64,
) -> ErrorEstimate {
    let parts = par_chunks(seed, Purpose::Smoothing, 0, n, |rng, len| {
        let mut acc = MeanAccumulator::default();
        let mut u = [0.0];
        for _ in 0..len {
            fill_gaussian(rng, &mut u);
            acc.push((profile.f(u[0]) - reference.eval(profile, u[0])).abs());
        }
        acc
    });
    merge(&parts).estimate(ErrorEstimate::DEFAULT_CONFIDENCE)
}

/// `‖f − T_ρ f‖₁ ≤ 2√π·Γ·√(1−ρ)` on a set with an exact profile, with `g`
/// evaluated from its degree-`reference_deg` series.
pub fn check_smoothing_bound(
    set: &ConceptSet,
    gamma: f64,
    rho: f64,
    reference_deg: u32,
    n: u64,
    seed: u64,
) -> Result<BoundCheck> {
    require_samples(n)?;
    let profile = Profile1d::of(set)?;
    let rhs = 2.0 * PI.sqrt() * gamma * (1.0 - rho).sqrt();
    let name = "smoothing: ||f - T_rho f||_1 <= 2 sqrt(pi) Gamma sqrt(1 - rho)";
    if rho == 1.0 {
        return Ok(BoundCheck::exact(name, 0.0, rhs));
    }
    let reference = SmoothedReference::new(&profile, rho, reference_deg)?;
    let est = smoothing_distance(&profile, &reference, n, seed);
    Ok(BoundCheck::new(name, Lhs::Estimate(est), rhs, reference.tail))
}

/// `‖g − p‖₂ ≤ ρ^{t+1}` computed exactly from the coefficients of `f` up to
/// their degree `T > t`; the unseen tail `ρ^{T+1}` is carried as slack.
pub fn check_truncation_bound(coeffs_f: &HermiteExpansion, rho: f64, t: u32) -> Result<BoundCheck> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::RhoOutOfRange(rho));
    }
    let reference = coeffs_f.degree().unwrap_or(0);
    if t >= reference {
        return Err(Error::InvalidParameter(format!(
            "truncation degree {t} must be below the reference degree {reference}"
        )));
    }
    let (tail_sum, unseen) = truncation_tail(coeffs_f, rho, t);
    Ok(BoundCheck::new(
        "truncation: ||T_rho f - Pi_t T_rho f||_2 <= rho^(t+1)",
        Lhs::Exact(tail_sum.sqrt()),
        rho.powi(t as i32 + 1),
        unseen.sqrt(),
    ))
}

/// `(Σ_{|α|>t} ρ^{2|α|} c_α², ρ^{2(T+1)})` for coefficients of degree `T`.
pub fn truncation_tail(coeffs_f: &HermiteExpansion, rho: f64, t: u32) -> (f64, f64) {
    let reference = coeffs_f.degree().unwrap_or(0);
    let sum = coeffs_f
        .terms()
        .filter(|(a, _)| a.total_degree() > t)
        .map(|(a, c)| rho.powi(2 * a.total_degree() as i32) * c * c)
        .sum();
    (sum, rho.powi(2 * (reference as i32 + 1)))
}

/// Smoothing and truncation bounds at `params` on the set's exact profile,
/// with reference degree `T ≥ max(400, t+1)` and certified tail.
pub fn check_lemma(set: &ConceptSet, params: &ConstructionParams, n: u64, seed: u64) -> Result<Vec<BoundCheck>> {
    let profile = Profile1d::of(set)?;
    let degree = reference_degree(params.rho, 400.max(params.t + 1))?;
    let smoothing = check_smoothing_bound(set, params.gamma, params.rho, degree, n, seed)?;
    let truncation = match profile.constant {
        Some(_) => BoundCheck::exact(
            "truncation: ||T_rho f - Pi_t T_rho f||_2 <= rho^(t+1)",
            0.0,
            params.truncation_bound(),
        ),
        None => check_truncation_bound(&profile.coeffs(degree), params.rho, params.t)?,
    };
    Ok(vec![smoothing, truncation])
}

/// Every intermediate inequality of the error bound for the construction
/// with `params`, on a set with an exact profile.
pub fn check_proof_chain(
    set: &ConceptSet,
    params: &ConstructionParams,
    n: u64,
    seed: u64,
) -> Result<Vec<BoundCheck>> {
    require_samples(n)?;
    let profile = Profile1d::of(set)?;
    let rho = params.rho;
    let t = params.t;
    let degree = reference_degree(rho, 400.max(t + 1))?;
    let reference = SmoothedReference::new(&profile, rho, degree)?;
    let tail = reference.tail;

    // p in the u variable
    let p = reference.f_coeffs.ou_apply(rho)?.truncate(t);
    let p_dense = p.dense_1d().expect("one-dimensional");
    let p_table = RecurrenceTable::new(p_dense.len());
    let p_norm2 = p.l2_norm().powi(2);
    let c0 = p.constant_term();

    // Paired per-sample differences; columns:
    // 0 |q−h|, 1 |q−(g+1)/2|, 2 |f−g|, 3 |(p−g)(p+g+2)|, 4 |g²−1|
    let parts = par_chunks(seed, Purpose::ProofChain, 0, n, |rng, len| {
        let mut acc = [MeanAccumulator::default(); 8];
        let mut u = [0.0];
        for _ in 0..len {
            fill_gaussian(rng, &mut u);
            let f = profile.f(u[0]);
            let h = 0.5 * (f + 1.0);
            let g = reference.eval(&profile, u[0]);
            let pv = p_table.sum_series(&p_dense, u[0]);
            let q = 0.25 * (1.0 + pv) * (1.0 + pv);
            let q_h = (q - h).abs();
            let q_g = (q - 0.5 * (g + 1.0)).abs();
            let f_g = (f - g).abs();
            let prod = ((pv - g) * (pv + g + 2.0)).abs();
            let g2 = (g * g - 1.0).abs();
            acc[0].push(q_h);
            acc[1].push(f_g);
            acc[2].push(q_h - q_g - 0.5 * f_g);
            acc[3].push(q_g - 0.25 * prod - 0.25 * g2);
            acc[4].push(g2 - 2.0 * f_g);
            acc[5].push(q_g - 0.5 * f_g);
            acc[6].push(q_h - f_g);
            acc[7].push(q_g);
        }
        acc
    });
    let mut tot = [MeanAccumulator::default(); 8];
    for part in &parts {
        for (a, b) in tot.iter_mut().zip(part) {
            a.merge(b);
        }
    }
    let est = |i: usize| tot[i].estimate(ErrorEstimate::DEFAULT_CONFIDENCE);

    // ‖g − p‖₂ = √(‖g‖² − ‖p‖²) since p is the projection of g
    let g_minus_p = (reference.norm2 - p_norm2).max(0.0).sqrt();
    let g_minus_p_upper = g_minus_p + tail;
    // ‖p + g + 2‖² = 3‖p‖² + ‖g‖² + 8c₀ + 4
    let term1 = (3.0 * p_norm2 + reference.norm2 + 8.0 * c0 + 4.0).max(0.0).sqrt();
    let smoothing_bound = params.smoothing_bound();
    let truncation_bound = params.truncation_bound();
    let combined = truncation_bound + smoothing_bound;
    let slack = 4.0 * tail;

    Ok(vec![
        BoundCheck::new(
            "contraction: ||p||_2 <= ||g||_2 <= 1",
            Lhs::Exact(p_norm2.sqrt().max(reference.norm2.sqrt())),
            1.0,
            tail,
        ),
        BoundCheck::new(
            "smoothing: ||f - g||_1 <= 2 sqrt(pi) Gamma sqrt(1 - rho)",
            Lhs::Estimate(est(1)),
            smoothing_bound,
            tail,
        ),
        BoundCheck::new(
            "truncation: ||g - p||_2 <= rho^(t+1)",
            Lhs::Exact(g_minus_p),
            truncation_bound,
            tail,
        ),
        BoundCheck::new(
            "target: ||q-h||_1 - ||q-(g+1)/2||_1 - ||f-g||_1/2 <= 0",
            Lhs::Estimate(est(2)),
            0.0,
            slack,
        ),
        BoundCheck::new(
            "decomposition: ||q-(g+1)/2||_1 - ||(p-g)(p+g+2)||_1/4 - ||g^2-1||_1/4 <= 0",
            Lhs::Estimate(est(3)),
            0.0,
            slack,
        ),
        BoundCheck::new("term1: ||p+g+2||_2 <= 4", Lhs::Exact(term1), 4.0, tail),
        BoundCheck::new(
            "term2: ||g^2-1||_1 - 2||f-g||_1 <= 0",
            Lhs::Estimate(est(4)),
            0.0,
            slack,
        ),
        BoundCheck::new(
            "intermediate: ||q-(g+1)/2||_1 - ||f-g||_1/2 <= ||p-g||_2",
            Lhs::Estimate(est(5)),
            g_minus_p_upper,
            slack,
        ),
        BoundCheck::new(
            "final: ||q-h||_1 - ||f-g||_1 <= ||p-g||_2",
            Lhs::Estimate(est(6)),
            g_minus_p_upper,
            slack,
        ),
        BoundCheck::new(
            "lemma bound: ||q-h||_1 <= rho^(t+1) + 2 sqrt(pi) Gamma sqrt(1-rho)",
            Lhs::Estimate(est(0)),
            combined,
            0.0,
        ),
        BoundCheck::exact(
            "epsilon: rho^(t+1) + 2 sqrt(pi) Gamma sqrt(1-rho) <= epsilon",
            combined,
            params.epsilon,
        ),
    ])
}

/// Compiled approximant paired with the set dimension, for callers that
/// evaluate many points.
pub fn compile_checked(form: &EvalForm, set: &ConceptSet) -> Result<CompiledForm> {
    if form.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: form.dim(),
        });
    }
    Ok(form.compile())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{choose_params, exact_coeffs_halfspace_1d, CoefficientMethod, ConstructionConfig};
    use approx::assert_relative_eq;

    #[test]
    fn verdict_states() {
        let est = |mean, se| ErrorEstimate {
            mean,
            std_error: se,
            n: 1000,
            confidence_level: 0.95,
        };
        assert_eq!(BoundCheck::estimated("a", est(0.1, 0.01), 0.2).verdict, Verdict::Holds);
        assert_eq!(BoundCheck::estimated("b", est(0.19, 0.01), 0.2).verdict, Verdict::HoldsWithinCi);
        assert_eq!(BoundCheck::estimated("c", est(0.3, 0.01), 0.2).verdict, Verdict::Violated);
        assert_eq!(BoundCheck::exact("d", 0.0, 0.0).verdict, Verdict::Holds);
        assert_eq!(BoundCheck::exact("e", 1e-3, 0.0).verdict, Verdict::Violated);
    }

    #[test]
    fn l1_of_constants() {
        let full = ConceptSet::full(2);
        let one = EvalForm::Expansion(HermiteExpansion::constant(2, 1.0));
        let e = l1_error(&one, &full, 5_000, 1).unwrap();
        assert_eq!((e.mean, e.std_error), (0.0, 0.0));
        let quarter = EvalForm::SquaredAffine(HermiteExpansion::new(2));
        let e = l1_error(&quarter, &full, 5_000, 1).unwrap();
        assert_eq!(e.mean, 0.75);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn l1_refuses_small_samples_and_bad_dims() {
        let full = ConceptSet::full(2);
        let one = EvalForm::Expansion(HermiteExpansion::constant(2, 1.0));
        assert!(matches!(l1_error(&one, &full, 999, 0), Err(Error::TooFewSamples { .. })));
        let wrong = EvalForm::Expansion(HermiteExpansion::constant(1, 1.0));
        assert!(matches!(l1_error(&wrong, &full, 5_000, 0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn zero_polynomial_measures_the_set() {
        let h = ConceptSet::halfspace(vec![1.0], 0.0).unwrap();
        let zero = EvalForm::Expansion(HermiteExpansion::new(1));
        let e = l1_error(&zero, &h, 200_000, 3).unwrap();
        assert!((e.mean - 0.5).abs() <= 3.0 * e.std_error);
    }

    #[test]
    fn smoothing_edge_cases() {
        let h = ConceptSet::halfspace(vec![1.0], 0.0).unwrap();
        let gamma = h.closed_form_gsa().unwrap();
        let at_one = check_smoothing_bound(&h, gamma, 1.0, 200, 10_000, 0).unwrap();
        assert_eq!(at_one.lhs, Lhs::Exact(0.0));
        assert_eq!(at_one.rhs, 0.0);
        assert_eq!(at_one.verdict, Verdict::Holds);

        let at_zero = check_smoothing_bound(&h, gamma, 0.0, 200, 10_000, 0).unwrap();
        assert_eq!(at_zero.lhs.value(), 1.0);
        assert_relative_eq!(at_zero.rhs, 2f64.sqrt(), epsilon = 1e-12);
        assert_eq!(at_zero.verdict, Verdict::Holds);

        assert!(matches!(
            check_smoothing_bound(&h, gamma, 0.99, 200, 10_000, 0),
            Err(Error::TailTooLarge { .. })
        ));
        let ball = ConceptSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!(matches!(
            check_smoothing_bound(&ball, 0.5, 0.5, 200, 10_000, 0),
            Err(Error::NoExactPath(_))
        ));
    }

    #[test]
    fn reference_degree_certifies_tail() {
        for rho in [0.3, 0.5, 0.9, 0.99, 0.995] {
            let t = reference_degree(rho, 400).unwrap();
            assert!(t >= 400);
            assert!(rho.powi(t as i32 + 1) <= REFERENCE_TAIL_TOLERANCE);
        }
        assert_eq!(reference_degree(0.0, 400).unwrap(), 400);
        assert!(reference_degree(0.999_999_9, 0).is_err());
    }

    #[test]
    fn truncation_examples() {
        let f = exact_coeffs_halfspace_1d(0.0, 200);
        let zero = check_truncation_bound(&f, 0.0, 0).unwrap();
        assert_eq!((zero.lhs.value(), zero.rhs), (0.0, 0.0));
        assert_eq!(zero.verdict, Verdict::Holds);
        let c = check_truncation_bound(&f, 0.9, 10).unwrap();
        assert_eq!(c.verdict, Verdict::Holds);
        assert!(c.lhs.value() < c.rhs);
        assert!(check_truncation_bound(&f, 0.9, 200).is_err());
    }

    #[test]
    fn nonnegativity_of_zero_q() {
        let q = EvalForm::SquaredAffine(HermiteExpansion::constant(1, -1.0));
        let c = check_nonnegativity(&q, 2_000, 0).unwrap();
        assert_eq!(c.verdict, Verdict::Holds);
        assert_eq!(c.lhs.value(), 0.0);
    }

    #[test]
    fn tail_grid_reaches_radius() {
        for d in 1..=4 {
            let g = tail_grid(d);
            assert!(g.iter().all(|x| x.len() == d));
            assert!(g.iter().any(|x| x.contains(&TAIL_GRID_RADIUS)));
            assert!(g.iter().any(|x| x.iter().any(|&v| v == -TAIL_GRID_RADIUS)));
        }
        assert_eq!(tail_grid(2).len(), 65 * 3 + 81);
    }

    #[test]
    fn proof_chain_at_rho_one() {
        let h = ConceptSet::halfspace(vec![1.0], 0.0).unwrap();
        let mut params = choose_params(
            h.closed_form_gsa().unwrap(),
            0.3,
            CoefficientMethod::Exact,
            &ConstructionConfig::default(),
        )
        .unwrap();
        params.rho = 1.0;
        params.t = 20;
        let checks = check_proof_chain(&h, &params, 20_000, 4).unwrap();
        let smoothing = &checks[1];
        assert_eq!(smoothing.lhs.value(), 0.0);
        assert_eq!(params.smoothing_bound(), 0.0);
        let (last, rest) = checks.split_last().unwrap();
        assert!(rest.iter().all(|c| !c.is_violated()), "{rest:#?}");
        // the combined bound collapses to ρ^{t+1} = 1, which cannot meet ε
        assert_eq!(last.lhs.value(), 1.0);
        assert!(last.is_violated());
    }
}
