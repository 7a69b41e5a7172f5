//! The four subcommands. Each returns an exit status and a printable report;
//! file outputs are written directly.

use std::fmt::Write as _;
use std::path::PathBuf;

use nonneg_approx::construction::{construct, validate_epsilon, CoefficientMethod, ConstructionConfig};
use nonneg_approx::sets::{gsa_class_bound, ClassBound, GsaMethod, GsaRequest, SetKind};
use nonneg_approx::verification::{check_definition_form, check_lemma, check_proof_chain, BoundCheck, Lhs};
use nonneg_approx::{ConceptSet, Error, GsaEstimate};

use crate::document::PolynomialDocument;
use crate::experiment::{sweep as run_sweep, write_csv, SweepOptions};
use crate::setspec::SetSpec;
use crate::{CliError, ExitStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GsaMode {
    /// Closed form when known, thickening otherwise.
    Auto,
    ClosedForm,
    Thickening,
    /// Unit-constant class bound: `max(√ln m, 1/√(2π))` for `m` halfspaces, `d^{1/4}` for balls.
    ClassBound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaChoice {
    pub mode: GsaMode,
    /// Overrides `mode` when set.
    pub supplied: Option<f64>,
    pub deltas: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
}

impl Default for GammaChoice {
    fn default() -> Self {
        let req = GsaRequest::default();
        Self {
            mode: GsaMode::Auto,
            supplied: None,
            deltas: req.deltas,
            samples: req.samples,
            seed: req.seed,
        }
    }
}

fn class_of(set: &ConceptSet) -> Result<ClassBound, CliError> {
    match set.kind() {
        SetKind::Halfspace(_) => Ok(ClassBound::Intersection(1)),
        SetKind::Intersection(hs) => Ok(ClassBound::Intersection(hs.len() as u32)),
        SetKind::Ball { .. } => Ok(ClassBound::Convex(set.dim() as u32)),
        _ => Err(CliError::invalid(format!("no class bound applies to {}", set.describe()))),
    }
}

pub fn resolve_gamma(set: &ConceptSet, choice: &GammaChoice) -> Result<GsaEstimate, CliError> {
    if let Some(g) = choice.supplied {
        if !(g >= 0.0 && g.is_finite()) {
            return Err(CliError::invalid(format!("--gamma must be finite and non-negative, got {g}")));
        }
        return Ok(GsaEstimate::supplied(g));
    }
    let method = match choice.mode {
        GsaMode::ClassBound => return Ok(GsaEstimate::class_bound(gsa_class_bound(class_of(set)?))),
        GsaMode::Auto => GsaMethod::Auto,
        GsaMode::ClosedForm => GsaMethod::ClosedForm,
        GsaMode::Thickening => GsaMethod::Thickening,
    };
    let request = GsaRequest {
        method,
        deltas: choice.deltas.clone(),
        samples: choice.samples,
        seed: choice.seed,
    };
    Ok(set.gsa(&request)?)
}

pub struct Outcome {
    pub status: ExitStatus,
    pub report: String,
}

#[derive(Debug, Clone)]
pub struct ConstructArgs {
    pub set: PathBuf,
    pub epsilon: f64,
    pub gamma: GammaChoice,
    pub method: Option<CoefficientMethod>,
    pub budget: u64,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn construct_cmd(args: &ConstructArgs) -> Result<Outcome, CliError> {
    validate_epsilon(args.epsilon)?;
    let set = SetSpec::load(&args.set)?.to_set()?;
    let gamma = resolve_gamma(&set, &args.gamma)?;
    let config = ConstructionConfig {
        method: args.method,
        sample_budget: args.budget,
        seed: args.seed,
        ..ConstructionConfig::default()
    };
    let approx = construct(&set, &gamma, args.epsilon, &config)?;
    PolynomialDocument::from_approx(&approx).save(&args.out)?;

    let d = &approx.diagnostics;
    let mut r = String::new();
    let _ = writeln!(r, "set                 {}", set.describe());
    let _ = writeln!(r, "epsilon             {}", args.epsilon);
    let _ = writeln!(r, "gamma               {} ({}, std error {})", gamma.value, gamma.method.as_str(), gamma.std_error);
    if gamma.method == nonneg_approx::sets::GsaSource::ClassBound {
        let _ = writeln!(r, "                    class bound with unit constant, not a certified value");
    }
    let _ = writeln!(r, "coefficient method  {}", d.coefficient_method.as_str());
    let _ = writeln!(r, "effective epsilon   {}", d.effective_epsilon);
    let _ = writeln!(r, "rho                 {}", approx.params.rho);
    let _ = writeln!(r, "t                   {}", approx.params.t);
    let _ = writeln!(r, "deg q               {}", approx.degree_q());
    let _ = writeln!(r, "realized deg q      {}", approx.realized_degree_q());
    let _ = writeln!(r, "p terms             {}", d.p_terms);
    let _ = writeln!(r, "||p||_2             {}", d.p_l2_norm);
    let _ = writeln!(r, "truncation bound    {}", d.truncation_tail_bound);
    let _ = writeln!(r, "smoothing bound     {}", d.smoothing_bound);
    if let Some(n) = d.coefficient_samples {
        let _ = writeln!(r, "coefficient samples {n}");
        let _ = writeln!(r, "estimation bound    {}", d.estimation_l2_bound.unwrap_or(f64::NAN));
    }
    let _ = writeln!(r, "guaranteed L1 bound {}", d.guaranteed_l1_bound);
    let _ = writeln!(r, "wrote {}", args.out.display());
    Ok(Outcome {
        status: ExitStatus::Success,
        report: r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CheckSelector {
    /// L1 error at most epsilon and non-negativity.
    Definition,
    /// Smoothing and truncation bounds (exact-profile sets only).
    Lemma,
    /// Every intermediate inequality of the error bound (exact-profile sets only).
    Chain,
    /// Definition, plus lemma and chain when the set has an exact profile.
    All,
}

#[derive(Debug, Clone)]
pub struct CheckArgs {
    pub poly: PathBuf,
    pub set: PathBuf,
    pub checks: CheckSelector,
    pub epsilon: Option<f64>,
    pub n: u64,
    pub seed: u64,
}

pub fn format_checks(checks: &[BoundCheck]) -> String {
    let mut r = String::new();
    let _ = writeln!(r, "{:<16} {:>14} {:>12} {:>14}  check", "verdict", "lhs", "+/-", "rhs");
    for c in checks {
        let half_width = match c.lhs {
            Lhs::Exact(_) => 0.0,
            Lhs::Estimate(e) => e.z() * e.std_error,
        } + c.slack;
        let _ = writeln!(
            r,
            "{:<16} {:>14.6e} {:>12.3e} {:>14.6e}  {}",
            c.verdict.to_string(),
            c.lhs.value(),
            half_width,
            c.rhs,
            c.name
        );
    }
    r
}

pub fn check_cmd(args: &CheckArgs) -> Result<Outcome, CliError> {
    let doc = PolynomialDocument::load(&args.poly)?;
    let form = doc.to_form()?;
    let set = SetSpec::load(&args.set)?.to_set()?;
    if form.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: form.dim(),
        }
        .into());
    }
    let epsilon = args
        .epsilon
        .or(doc.params.map(|p| p.epsilon))
        .ok_or_else(|| CliError::invalid("--epsilon is required when the document carries no parameters"))?;
    validate_epsilon(epsilon)?;
    let params = || {
        doc.params.map(|p| nonneg_approx::construction::ConstructionParams { epsilon, ..p }).ok_or_else(|| {
            CliError::invalid("lemma and chain checks need the construction parameters stored by `construct`")
        })
    };

    let mut checks = Vec::new();
    let mut notes = String::new();
    let exact = set.exact_profile().is_some();
    let want = |s: CheckSelector| args.checks == s || args.checks == CheckSelector::All;
    if want(CheckSelector::Definition) {
        checks.extend(check_definition_form(&form, &set, epsilon, args.n, args.seed)?);
    }
    if args.checks == CheckSelector::All && !exact {
        let _ = writeln!(
            notes,
            "note: lemma and chain checks skipped; {} has no exact coefficient path",
            set.describe()
        );
    } else {
        if want(CheckSelector::Lemma) {
            checks.extend(check_lemma(&set, &params()?, args.n, args.seed)?);
        }
        if want(CheckSelector::Chain) {
            checks.extend(check_proof_chain(&set, &params()?, args.n, args.seed)?);
        }
    }
    let status = if checks.iter().any(BoundCheck::is_violated) {
        ExitStatus::Violated
    } else {
        ExitStatus::Success
    };
    Ok(Outcome {
        status,
        report: notes + &format_checks(&checks),
    })
}

#[derive(Debug, Clone)]
pub struct GsaArgs {
    pub set: PathBuf,
    pub gamma: GammaChoice,
}

pub fn gsa_cmd(args: &GsaArgs) -> Result<Outcome, CliError> {
    let set = SetSpec::load(&args.set)?.to_set()?;
    let est = resolve_gamma(&set, &args.gamma)?;
    let mut r = String::new();
    let _ = writeln!(r, "set       {}", set.describe());
    let _ = writeln!(r, "gsa       {}", est.value);
    let _ = writeln!(r, "std error {}", est.std_error);
    let _ = writeln!(r, "method    {}", est.method.as_str());
    if args.gamma.mode == GsaMode::Thickening {
        let _ = writeln!(r, "deltas    {:?}", args.gamma.deltas);
        let _ = writeln!(r, "samples   {} per delta", args.gamma.samples);
    }
    if args.gamma.mode == GsaMode::ClassBound {
        let _ = writeln!(r, "note      class bound with unit constant, not a certified value");
    }
    Ok(Outcome {
        status: ExitStatus::Success,
        report: r,
    })
}

pub fn sweep_cmd(opts: &SweepOptions, out: Option<&PathBuf>) -> Result<Outcome, CliError> {
    let rows = run_sweep(opts)?;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf)?;
    let report = match out {
        Some(path) => {
            std::fs::write(path, &buf).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
            format!("wrote {} rows to {}\n", rows.len(), path.display())
        }
        None => String::from_utf8(buf).expect("csv is utf-8"),
    };
    Ok(Outcome {
        status: ExitStatus::Success,
        report,
    })
}
