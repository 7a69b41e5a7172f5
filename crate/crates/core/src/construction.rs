//! Builds `q = ¼(1 + p)²` with `p = Π_{≤t} T_ρ f` for `f = 2·1_H − 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::quadrature::GaussHermite;
use crate::hermite::{count_up_to, indices_up_to, EvalForm, HermiteExpansion, MultiIndex, RecurrenceTable};
use crate::rng::{fill_gaussian, par_chunks, Purpose};
use crate::sets::{ConceptSet, ExactProfile, GsaEstimate, GsaSource};
use crate::stats::{normal_cdf, normal_pdf, ErrorEstimate, MeanAccumulator};
use crate::verification::l1_error;

/// Relative tolerance applied before the ceiling in the degree formula.
pub const DEGREE_ROUNDING_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientMethod {
    /// Closed-form coefficients for sets that are unions of intervals along one direction.
    Exact,
    /// Tensorized Gauss–Hermite quadrature, `d ≤ 3` and `t ≤ 30`.
    Quadrature,
    /// Sample means of `f(x)·h_α(x)` under `γ_d`.
    MonteCarlo,
}

impl CoefficientMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoefficientMethod::Exact => "exact",
            CoefficientMethod::Quadrature => "quadrature",
            CoefficientMethod::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionConfig {
    /// `None` picks exact when the set admits it and Monte Carlo otherwise.
    pub method: Option<CoefficientMethod>,
    pub sample_budget: u64,
    pub seed: u64,
    pub estimation_budget_fraction: f64,
    pub max_coefficients: u128,
    /// `q` is also expanded in the basis when it has at most this many possible terms
    pub max_square_terms: u128,
    /// and degree at most this; the expanded form is ill-conditioned beyond it.
    pub max_square_degree: u32,
    pub quadrature_nodes: usize,
}

impl Default for ConstructionConfig {
    fn default() -> Self {
        Self {
            method: None,
            sample_budget: 100_000_000,
            seed: 0,
            estimation_budget_fraction: 0.25,
            max_coefficients: 2_000_000,
            max_square_terms: 20_000,
            max_square_degree: 40,
            quadrature_nodes: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub epsilon: f64,
    pub gamma: f64,
    pub rho: f64,
    pub t: u32,
    pub method: CoefficientMethod,
    pub sample_budget: u64,
    pub seed: u64,
    pub estimation_budget_fraction: f64,
}

impl ConstructionParams {
    /// Accuracy target used for `ρ` and `t`: reduced by the estimation share under Monte Carlo.
    pub fn effective_epsilon(&self) -> f64 {
        effective_epsilon(self.epsilon, self.method, self.estimation_budget_fraction)
    }

    /// `2√π·Γ·√(1−ρ)`.
    pub fn smoothing_bound(&self) -> f64 {
        2.0 * PI.sqrt() * self.gamma * (1.0 - self.rho).sqrt()
    }

    /// `ρ^{t+1}`.
    pub fn truncation_bound(&self) -> f64 {
        self.rho.powi(self.t as i32 + 1)
    }
}

fn effective_epsilon(epsilon: f64, method: CoefficientMethod, fraction: f64) -> f64 {
    match method {
        CoefficientMethod::MonteCarlo => epsilon * (1.0 - fraction),
        _ => epsilon,
    }
}

pub fn validate_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 0.5 {
        Ok(())
    } else {
        Err(Error::EpsilonOutOfRange(epsilon))
    }
}

/// Selects `ρ = 1 − min{1, ε²/(16π·Γ²)}` and the smallest `t` with
/// `(t+1)(1−ρ) ≥ ln(2/ε)`, with `ε` replaced by the effective target under
/// Monte Carlo. `Γ = 0` or `ρ = 0` gives `t = 0`.
pub fn choose_params(
    gamma: f64,
    epsilon: f64,
    method: CoefficientMethod,
    config: &ConstructionConfig,
) -> Result<ConstructionParams> {
    validate_epsilon(epsilon)?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Gaussian surface area must be finite and non-negative, got {gamma}"
        )));
    }
    let fraction = config.estimation_budget_fraction;
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "estimation budget fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let eps_eff = effective_epsilon(epsilon, method, fraction);
    let (rho, t) = if gamma == 0.0 {
        (0.0, 0)
    } else {
        let rho = 1.0 - (eps_eff * eps_eff / (16.0 * PI * gamma * gamma)).min(1.0);
        (rho, formula_degree(rho, eps_eff))
    };
    Ok(ConstructionParams {
        epsilon,
        gamma,
        rho,
        t,
        method,
        sample_budget: config.sample_budget,
        seed: config.seed,
        estimation_budget_fraction: fraction,
    })
}

/// Smallest `t ≥ 0` with `(t+1)(1−ρ) ≥ ln(2/ε)`; `0` when `ρ = 0`.
pub fn formula_degree(rho: f64, epsilon: f64) -> u32 {
    if rho == 0.0 {
        return 0;
    }
    let ratio = (2.0 / epsilon).ln() / (1.0 - rho);
    let t_plus_one = (ratio * (1.0 - DEGREE_ROUNDING_TOLERANCE)).ceil().max(1.0);
    assert!(t_plus_one < u32::MAX as f64, "degree overflow");
    t_plus_one as u32 - 1
}

/// Exact coefficients of `f = 2·1{x ≤ θ} − 1` up to degree `t`:
/// `c_0 = 2Φ(θ) − 1`, `c_n = −2·φ(θ)·h_{n−1}(θ)/√n`.
pub fn exact_coeffs_halfspace_1d(theta: f64, t: u32) -> HermiteExpansion {
    exact_coeffs_intervals_1d(&[(f64::NEG_INFINITY, theta)], t)
}

/// Exact coefficients of `f = 2·1_U − 1` for a union `U` of disjoint closed intervals.
pub fn exact_coeffs_intervals_1d(intervals: &[(f64, f64)], t: u32) -> HermiteExpansion {
    let t = t as usize;
    let mut coeffs = vec![0.0; t + 1];
    coeffs[0] = 2.0 * intervals
        .iter()
        .map(|&(a, b)| normal_cdf(b) - normal_cdf(a))
        .sum::<f64>()
        - 1.0;
    if t > 0 {
        let table = RecurrenceTable::new(t);
        let mut h = vec![0.0; t];
        // ∫_{-∞}^{e} h_n dγ = −φ(e)·h_{n−1}(e)/√n
        let mut endpoint = |e: f64, sign: f64, coeffs: &mut [f64]| {
            if !e.is_finite() {
                return;
            }
            table.fill(e, &mut h);
            let w = sign * 2.0 * normal_pdf(e);
            for n in 1..=t {
                coeffs[n] += w * h[n - 1] / (n as f64).sqrt();
            }
        };
        for &(a, b) in intervals {
            endpoint(b, -1.0, &mut coeffs);
            endpoint(a, 1.0, &mut coeffs);
        }
    }
    HermiteExpansion::from_dense_1d(&coeffs)
}

/// Exact coefficients of `f` for a set with an [`ExactProfile`], in `dim` variables.
pub fn exact_coeffs(set: &ConceptSet, t: u32, max_coefficients: u128) -> Result<HermiteExpansion> {
    let profile = set
        .exact_profile()
        .ok_or_else(|| Error::NoExactPath(set.describe()))?;
    match profile {
        ExactProfile::Constant(c) => Ok(HermiteExpansion::constant(set.dim(), c)),
        ExactProfile::Directional {
            direction,
            intervals,
        } => {
            let one_d = exact_coeffs_intervals_1d(&intervals, t);
            if direction == [1.0] {
                return Ok(one_d);
            }
            let required = count_up_to(set.dim(), t);
            if required > max_coefficients {
                return Err(Error::CoefficientCap {
                    required,
                    cap: max_coefficients,
                });
            }
            one_d.along_direction(&direction)
        }
    }
}

/// Monte Carlo coefficient estimates with per-coefficient standard errors.
#[derive(Debug, Clone)]
pub struct EstimatedCoefficients {
    pub indices: Vec<MultiIndex>,
    pub means: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub samples: u64,
}

impl EstimatedCoefficients {
    pub fn to_expansion(&self, dim: usize) -> HermiteExpansion {
        HermiteExpansion::from_terms(dim, self.indices.iter().cloned().zip(self.means.iter().copied()))
            .expect("indices match dimension")
    }

    /// `√(Σ_α SE_α²)`: estimated L2 error of the coefficient vector.
    pub fn l2_std_error(&self) -> f64 {
        self.std_errors.iter().map(|s| s * s).sum::<f64>().sqrt()
    }
}

/// Estimates `E[f(x)·h_α(x)]` for every `|α| ≤ t` from `n` Gaussian samples.
pub fn estimate_coeffs(
    set: &ConceptSet,
    t: u32,
    n: u64,
    seed: u64,
    max_coefficients: u128,
) -> Result<EstimatedCoefficients> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be positive".into()));
    }
    let dim = set.dim();
    let required = count_up_to(dim, t);
    if required > max_coefficients {
        return Err(Error::CoefficientCap {
            required,
            cap: max_coefficients,
        });
    }
    let indices = indices_up_to(dim, t);
    let flat: Vec<usize> = indices
        .iter()
        .flat_map(|a| a.exponents().iter().map(|&e| e as usize))
        .collect();
    let table = RecurrenceTable::new(t as usize + 1);
    let stride = t as usize + 1;
    let partials = par_chunks(seed, Purpose::CoefficientEstimate, 0, n, |rng, len| {
        let mut acc = vec![MeanAccumulator::default(); indices.len()];
        let mut x = vec![0.0; dim];
        let mut h = vec![0.0; dim * stride];
        for _ in 0..len {
            fill_gaussian(rng, &mut x);
            let f = if set.contains(&x) { 1.0 } else { -1.0 };
            for i in 0..dim {
                table.fill(x[i], &mut h[i * stride..(i + 1) * stride]);
            }
            for (j, a) in acc.iter_mut().enumerate() {
                let e = &flat[j * dim..(j + 1) * dim];
                let mut v = f;
                for i in 0..dim {
                    v *= h[i * stride + e[i]];
                }
                a.push(v);
            }
        }
        acc
    });
    let mut total = vec![MeanAccumulator::default(); indices.len()];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    Ok(EstimatedCoefficients {
        means: total.iter().map(|a| a.mean).collect(),
        std_errors: total.iter().map(|a| a.std_error()).collect(),
        indices,
        samples: n,
    })
}

/// Tensorized Gauss–Hermite projection of `f` onto `|α| ≤ t`.
pub fn quadrature_coeffs(set: &ConceptSet, t: u32, nodes: usize) -> Result<HermiteExpansion> {
    let dim = set.dim();
    if dim > 3 || t > 30 {
        return Err(Error::InvalidParameter(format!(
            "quadrature coefficients are limited to d ≤ 3 and t ≤ 30 (got d = {dim}, t = {t})"
        )));
    }
    let rule = GaussHermite::new(nodes.max(t as usize + 1));
    let indices = indices_up_to(dim, t);
    let table = RecurrenceTable::new(t as usize + 1);
    let stride = t as usize + 1;
    let mut h = vec![0.0; dim * stride];
    let n = rule.len();
    let mut sums = vec![0.0; indices.len()];
    let mut idx = vec![0usize; dim];
    let mut x = vec![0.0; dim];
    loop {
        let mut w = 1.0;
        for (i, &k) in idx.iter().enumerate() {
            x[i] = rule.nodes()[k];
            w *= rule.weights()[k];
        }
        let f = if set.contains(&x) { w } else { -w };
        for i in 0..dim {
            table.fill(x[i], &mut h[i * stride..(i + 1) * stride]);
        }
        for (s, a) in sums.iter_mut().zip(&indices) {
            let mut v = f;
            for (i, &e) in a.exponents().iter().enumerate() {
                v *= h[i * stride + e as usize];
            }
            *s += v;
        }
        let mut pos = 0;
        loop {
            if pos == dim {
                return HermiteExpansion::from_terms(dim, indices.into_iter().zip(sums));
            }
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub gamma_source: GsaSource,
    pub gamma_std_error: f64,
    pub coefficient_method: CoefficientMethod,
    pub effective_epsilon: f64,
    /// Samples used for Monte Carlo coefficients.
    pub coefficient_samples: Option<u64>,
    /// `√(C(t+d,d)/n)`, the a-priori L2 estimation error bound.
    pub estimation_l2_bound: Option<f64>,
    /// `√(Σ SE_α²)` from the sample.
    pub estimated_l2_std_error: Option<f64>,
    pub max_coefficient_std_error: Option<f64>,
    /// `ρ^{t+1}`, the guaranteed bound on `‖g − p‖₂`.
    pub truncation_tail_bound: f64,
    /// `2√π·Γ·√(1−ρ)`.
    pub smoothing_bound: f64,
    /// Sum of the two bounds above, plus the estimation bound when present.
    pub guaranteed_l1_bound: f64,
    pub p_terms: usize,
    pub p_l2_norm: f64,
    pub q_l2_norm: Option<f64>,
}

/// Output bundle of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct NonNegApprox {
    pub p: HermiteExpansion,
    pub q_form: EvalForm,
    pub q_expansion: Option<HermiteExpansion>,
    pub params: ConstructionParams,
    pub diagnostics: Diagnostics,
}

impl NonNegApprox {
    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    /// Degree bound `2t` of `q`.
    pub fn degree_q(&self) -> u32 {
        2 * self.params.t
    }

    /// Highest degree actually present in `p`; below `t` when top coefficients vanish.
    pub fn realized_degree_p(&self) -> u32 {
        self.p.degree().unwrap_or(0)
    }

    pub fn realized_degree_q(&self) -> u32 {
        self.q_form.degree().unwrap_or(0)
    }
}

fn resolve_method(set: &ConceptSet, config: &ConstructionConfig) -> CoefficientMethod {
    config.method.unwrap_or_else(|| {
        if set.exact_profile().is_some() {
            CoefficientMethod::Exact
        } else {
            CoefficientMethod::MonteCarlo
        }
    })
}

/// Runs the full construction at the formula's `(ρ, t)`.
pub fn construct(
    set: &ConceptSet,
    gamma: &GsaEstimate,
    epsilon: f64,
    config: &ConstructionConfig,
) -> Result<NonNegApprox> {
    let method = resolve_method(set, config);
    if method == CoefficientMethod::Exact && set.exact_profile().is_none() {
        return Err(Error::NoExactPath(set.describe()));
    }
    let params = choose_params(gamma.value, epsilon, method, config)?;
    construct_with_params(set, gamma, params, config)
}

/// Monte Carlo sample count meeting `√(C(t+d,d)/n) ≤ fraction·ε`.
pub fn required_coefficient_samples(dim: usize, t: u32, epsilon: f64, fraction: f64) -> u128 {
    let count = count_up_to(dim, t) as f64;
    let target = fraction * epsilon;
    let n = (count / (target * target)).ceil();
    if n >= u128::MAX as f64 {
        u128::MAX
    } else {
        n as u128
    }
}

/// Runs the construction for explicit parameters (used to evaluate `t` other than the formula's).
pub fn construct_with_params(
    set: &ConceptSet,
    gamma: &GsaEstimate,
    params: ConstructionParams,
    config: &ConstructionConfig,
) -> Result<NonNegApprox> {
    validate_epsilon(params.epsilon)?;
    let dim = set.dim();
    let t = params.t;
    let mut coefficient_samples = None;
    let mut estimation_l2_bound = None;
    let mut estimated_l2_std_error = None;
    let mut max_coefficient_std_error = None;
    let f_coeffs = match params.method {
        CoefficientMethod::Exact => exact_coeffs(set, t, config.max_coefficients)?,
        CoefficientMethod::Quadrature => quadrature_coeffs(set, t, config.quadrature_nodes)?,
        CoefficientMethod::MonteCarlo => {
            let count = count_up_to(dim, t);
            if count > config.max_coefficients {
                return Err(Error::CoefficientCap {
                    required: count,
                    cap: config.max_coefficients,
                });
            }
            let required =
                required_coefficient_samples(dim, t, params.epsilon, params.estimation_budget_fraction);
            if required > params.sample_budget as u128 {
                return Err(Error::BudgetExceeded {
                    required,
                    budget: params.sample_budget,
                });
            }
            let n = required as u64;
            let est = estimate_coeffs(set, t, n, params.seed, config.max_coefficients)?;
            coefficient_samples = Some(n);
            estimation_l2_bound = Some((count as f64 / n as f64).sqrt());
            estimated_l2_std_error = Some(est.l2_std_error());
            max_coefficient_std_error = Some(est.std_errors.iter().cloned().fold(0.0, f64::max));
            est.to_expansion(dim)
        }
    };
    let p = f_coeffs.ou_apply(params.rho)?.truncate(t);
    let q_expansion = (count_up_to(dim, 2 * t) <= config.max_square_terms && 2 * t <= config.max_square_degree)
        .then(|| p.affine_square());
    let truncation_tail_bound = params.truncation_bound();
    let smoothing_bound = params.smoothing_bound();
    let diagnostics = Diagnostics {
        gamma_source: gamma.method,
        gamma_std_error: gamma.std_error,
        coefficient_method: params.method,
        effective_epsilon: params.effective_epsilon(),
        coefficient_samples,
        estimation_l2_bound,
        estimated_l2_std_error,
        max_coefficient_std_error,
        truncation_tail_bound,
        smoothing_bound,
        guaranteed_l1_bound: truncation_tail_bound + smoothing_bound + estimation_l2_bound.unwrap_or(0.0),
        p_terms: p.len(),
        p_l2_norm: p.l2_norm(),
        q_l2_norm: q_expansion.as_ref().map(HermiteExpansion::l2_norm),
    };
    Ok(NonNegApprox {
        q_form: EvalForm::SquaredAffine(p.clone()),
        p,
        q_expansion,
        params,
        diagnostics,
    })
}

/// Result of the empirical degree search.
#[derive(Debug, Clone)]
pub struct EmpiricalDegree {
    pub t: u32,
    pub approx: NonNegApprox,
    pub l1: ErrorEstimate,
}

/// Smallest `t` in `t_grid` whose construction (at the formula's `ρ`) has a
/// Monte Carlo L1 upper confidence bound `≤ ε`. `None` if no grid point suffices.
pub fn minimal_empirical_t(
    set: &ConceptSet,
    gamma: &GsaEstimate,
    epsilon: f64,
    t_grid: &[u32],
    config: &ConstructionConfig,
    l1_samples: u64,
) -> Result<Option<EmpiricalDegree>> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("t grid must be non-empty and strictly ascending".into()));
    }
    let method = resolve_method(set, config);
    let base = choose_params(gamma.value, epsilon, method, config)?;
    for &t in t_grid {
        let params = ConstructionParams { t, ..base };
        let approx = construct_with_params(set, gamma, params, config)?;
        let l1 = l1_error(&approx.q_form, set, l1_samples, config.seed)?;
        if l1.upper() <= epsilon {
            return Ok(Some(EmpiricalDegree { t, approx, l1 }));
        }
    }
    Ok(None)
}
