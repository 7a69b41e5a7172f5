//! Parameter sweeps and their CSV rows.
//!
//! Column order is frozen; new columns are only ever appended:
//!
//! `set, epsilon, gamma, rho, t_formula, t_empirical, deg_q, l1_mean,
//! l1_std_error, n, seed, gamma_source, coefficient_method,
//! coefficient_samples, sample_budget, point`
//!
//! `t_empirical` is filled when a `t` grid is given; `deg_q` and the L1
//! columns then describe the construction at `t_empirical` (empty if no grid
//! point reached `ε`), otherwise the construction at `t_formula`. `n` is the
//! number of L1 evaluation samples. `point` is the swept value (`m`, `d` or `ε`).

use std::io::Write;

use nonneg_approx::construction::{
    choose_params, construct_with_params, minimal_empirical_t, CoefficientMethod, ConstructionConfig,
};
use nonneg_approx::rng::{fill_gaussian, stream_rng, Purpose};
use nonneg_approx::sets::{gsa_class_bound, ClassBound, Halfspace};
use nonneg_approx::verification::l1_error;
use nonneg_approx::{ConceptSet, GsaEstimate};
use serde::{Deserialize, Serialize};

use crate::commands::{resolve_gamma, GammaChoice};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub set: String,
    pub epsilon: f64,
    pub gamma: f64,
    pub rho: f64,
    pub t_formula: u32,
    pub t_empirical: Option<u32>,
    pub deg_q: Option<u32>,
    pub l1_mean: Option<f64>,
    pub l1_std_error: Option<f64>,
    pub n: u64,
    pub seed: u64,
    pub gamma_source: String,
    pub coefficient_method: String,
    pub coefficient_samples: Option<u64>,
    pub sample_budget: u64,
    pub point: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Intersections of `m` halfspaces in `dim` dimensions with `Γ` from the class bound.
    IntersectionM,
    /// Origin-centred balls of fixed radius in `d` dimensions with closed-form `Γ`.
    BallD,
    /// A fixed set over a list of `ε`.
    Epsilon,
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub family: Family,
    pub range: Vec<f64>,
    /// Fixed `ε` for the `m` and `d` families.
    pub epsilon: Option<f64>,
    /// Set for the `ε` family.
    pub set: Option<ConceptSet>,
    pub gamma: GammaChoice,
    pub t_grid: Option<Vec<u32>>,
    pub method: Option<CoefficientMethod>,
    pub budget: u64,
    pub seed: u64,
    pub l1_samples: u64,
    /// Ambient dimension of the intersection family.
    pub intersection_dim: usize,
    pub ball_radius: f64,
}

impl SweepOptions {
    pub fn new(family: Family, range: Vec<f64>) -> Self {
        Self {
            family,
            range,
            epsilon: None,
            set: None,
            gamma: GammaChoice::default(),
            t_grid: None,
            method: None,
            budget: ConstructionConfig::default().sample_budget,
            seed: 0,
            l1_samples: 1_000_000,
            intersection_dim: 3,
            ball_radius: 1.0,
        }
    }
}

/// `m` halfspaces in `dim` dimensions with Gaussian-random unit normals drawn
/// from the set-sampling stream `m` of `seed`, all at offset `θ = √(2 ln m)`.
pub fn random_intersection(dim: usize, m: u32, seed: u64) -> Result<ConceptSet, CliError> {
    if m == 0 || dim == 0 {
        return Err(CliError::invalid("intersection family needs m >= 1 and dim >= 1"));
    }
    let sub = u16::try_from(m).map_err(|_| CliError::invalid(format!("m = {m} is too large")))?;
    let mut rng = stream_rng(seed, Purpose::SetSampling, sub, 0);
    let theta = (2.0 * (m as f64).ln()).sqrt();
    let mut halfspaces = Vec::with_capacity(m as usize);
    let mut w = vec![0.0; dim];
    while halfspaces.len() < m as usize {
        fill_gaussian(&mut rng, &mut w);
        if w.iter().any(|&x| x != 0.0) {
            halfspaces.push(Halfspace::new(w.clone(), theta)?);
        }
    }
    Ok(ConceptSet::intersection(halfspaces)?)
}

fn positive_integer(v: f64, what: &str) -> Result<u32, CliError> {
    if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as u32)
    } else {
        Err(CliError::invalid(format!("{what} must be a positive integer, got {v}")))
    }
}

struct Point {
    set: ConceptSet,
    gamma: GsaEstimate,
    epsilon: f64,
    method: Option<CoefficientMethod>,
}

fn sweep_points(opts: &SweepOptions) -> Result<Vec<Point>, CliError> {
    if opts.range.is_empty() {
        return Err(CliError::invalid("sweep range must not be empty"));
    }
    let fixed_epsilon = || {
        opts.epsilon
            .ok_or_else(|| CliError::invalid("this family needs a fixed --epsilon"))
    };
    opts.range
        .iter()
        .map(|&v| match opts.family {
            Family::IntersectionM => {
                let m = positive_integer(v, "m")?;
                let set = random_intersection(opts.intersection_dim, m, opts.seed)?;
                let gamma = match opts.gamma.supplied {
                    Some(g) => GsaEstimate::supplied(g),
                    None => GsaEstimate::class_bound(gsa_class_bound(ClassBound::Intersection(m))),
                };
                Ok(Point {
                    set,
                    gamma,
                    epsilon: fixed_epsilon()?,
                    // The family exercises estimated coefficients even when m = 1.
                    method: Some(opts.method.unwrap_or(CoefficientMethod::MonteCarlo)),
                })
            }
            Family::BallD => {
                let d = positive_integer(v, "d")? as usize;
                let set = ConceptSet::ball(vec![0.0; d], opts.ball_radius)?;
                let gamma = resolve_gamma(&set, &opts.gamma)?;
                Ok(Point {
                    set,
                    gamma,
                    epsilon: fixed_epsilon()?,
                    method: opts.method,
                })
            }
            Family::Epsilon => {
                let set = opts
                    .set
                    .clone()
                    .ok_or_else(|| CliError::invalid("the epsilon family needs --set"))?;
                let gamma = resolve_gamma(&set, &opts.gamma)?;
                Ok(Point {
                    set,
                    gamma,
                    epsilon: v,
                    method: opts.method,
                })
            }
        })
        .collect()
}

fn method_for(set: &ConceptSet, method: Option<CoefficientMethod>) -> CoefficientMethod {
    method.unwrap_or(if set.exact_profile().is_some() {
        CoefficientMethod::Exact
    } else {
        CoefficientMethod::MonteCarlo
    })
}

/// Runs the sweep and returns one row per point, in range order.
pub fn sweep(opts: &SweepOptions) -> Result<Vec<ExperimentRow>, CliError> {
    let points = sweep_points(opts)?;
    let mut rows = Vec::with_capacity(points.len());
    for (point, &value) in points.iter().zip(&opts.range) {
        let method = method_for(&point.set, point.method);
        let config = ConstructionConfig {
            method: Some(method),
            sample_budget: opts.budget,
            seed: opts.seed,
            ..ConstructionConfig::default()
        };
        let params = choose_params(point.gamma.value, point.epsilon, method, &config)?;
        let mut row = ExperimentRow {
            set: point.set.describe(),
            epsilon: point.epsilon,
            gamma: point.gamma.value,
            rho: params.rho,
            t_formula: params.t,
            t_empirical: None,
            deg_q: None,
            l1_mean: None,
            l1_std_error: None,
            n: opts.l1_samples,
            seed: opts.seed,
            gamma_source: point.gamma.method.as_str().to_string(),
            coefficient_method: method.as_str().to_string(),
            coefficient_samples: None,
            sample_budget: opts.budget,
            point: value,
        };
        match &opts.t_grid {
            Some(grid) => {
                let found =
                    minimal_empirical_t(&point.set, &point.gamma, point.epsilon, grid, &config, opts.l1_samples)?;
                if let Some(emp) = found {
                    row.t_empirical = Some(emp.t);
                    row.deg_q = Some(emp.approx.degree_q());
                    row.l1_mean = Some(emp.l1.mean);
                    row.l1_std_error = Some(emp.l1.std_error);
                    row.coefficient_samples = emp.approx.diagnostics.coefficient_samples;
                }
            }
            None => {
                let approx = construct_with_params(&point.set, &point.gamma, params, &config)?;
                let l1 = l1_error(&approx.q_form, &point.set, opts.l1_samples, opts.seed)?;
                row.deg_q = Some(approx.degree_q());
                row.l1_mean = Some(l1.mean);
                row.l1_std_error = Some(l1.std_error);
                row.coefficient_samples = approx.diagnostics.coefficient_samples;
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[ExperimentRow], out: W) -> Result<(), CliError> {
    let mut wtr = csv::Writer::from_writer(out);
    for row in rows {
        wtr.serialize(row).map_err(|e| CliError::io(format!("csv write failed: {e}")))?;
    }
    wtr.flush().map_err(|e| CliError::io(format!("csv write failed: {e}")))
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<ExperimentRow>, CliError> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::invalid(format!("bad experiment csv: {e}")))
}

/// Least-squares line `y ≈ a + b·x` and its coefficient of determination.
pub fn affine_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (intercept, slope, r2)
}
