use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nonneg_approx::construction::CoefficientMethod;
use nonneg_approx_cli::commands::{
    check_cmd, construct_cmd, gsa_cmd, sweep_cmd, CheckArgs, CheckSelector, ConstructArgs, GammaChoice, GsaArgs,
    GsaMode, Outcome,
};
use nonneg_approx_cli::experiment::{Family, SweepOptions};
use nonneg_approx_cli::{parse_list, CliError, ExitStatus};

/// Non-negative L1-approximating polynomials for Gaussian concept sets.
///
/// Exit codes: 0 ok, 1 a check was violated, 2 invalid input, 3 budget or cap exceeded.
#[derive(Parser)]
#[command(name = "nnapprox", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build q = (1 + p)^2 / 4 for a set and write it as JSON.
    Construct(ConstructCli),
    /// Verify a polynomial document against a set.
    Check(CheckCli),
    /// Run a parameter sweep and write CSV rows.
    Sweep(SweepCli),
    /// Estimate or look up the Gaussian surface area of a set.
    Gsa(GsaCli),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Quadrature,
    Mc,
}

impl From<MethodArg> for CoefficientMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => CoefficientMethod::Exact,
            MethodArg::Quadrature => CoefficientMethod::Quadrature,
            MethodArg::Mc => CoefficientMethod::MonteCarlo,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    IntersectionM,
    BallD,
    Epsilon,
}

#[derive(Args)]
struct GsaFlags {
    /// How to obtain the Gaussian surface area.
    #[arg(long = "gsa", value_enum, default_value = "auto")]
    mode: GsaMode,
    /// Use this surface area instead of computing one.
    #[arg(long)]
    gamma: Option<f64>,
    /// Comma-separated thickening widths.
    #[arg(long, default_value = "0.1,0.05,0.025")]
    delta_list: String,
    /// Thickening samples per width.
    #[arg(long, default_value_t = 1_000_000)]
    gsa_n: u64,
}

impl GsaFlags {
    fn choice(&self, seed: u64) -> Result<GammaChoice, CliError> {
        Ok(GammaChoice {
            mode: self.mode,
            supplied: self.gamma,
            deltas: parse_list(&self.delta_list, "delta list")?,
            samples: self.gsa_n,
            seed,
        })
    }
}

#[derive(Args)]
struct ConstructCli {
    /// TOML set specification.
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[command(flatten)]
    gsa: GsaFlags,
    /// Coefficient method; exact when the set allows it, Monte Carlo otherwise.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Monte Carlo sample budget for the coefficients.
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output JSON path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckCli {
    /// Polynomial document written by `construct`.
    #[arg(long)]
    poly: PathBuf,
    #[arg(long)]
    set: PathBuf,
    #[arg(long, value_enum, default_value = "definition")]
    checks: CheckSelector,
    /// Defaults to the epsilon stored in the document.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Monte Carlo samples per estimate.
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SweepCli {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Comma-separated points: m values, dimensions, or epsilons.
    #[arg(long)]
    range: String,
    /// Fixed epsilon for the intersection-m and ball-d families.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Set for the epsilon family.
    #[arg(long)]
    set: Option<PathBuf>,
    #[command(flatten)]
    gsa: GsaFlags,
    /// Comma-separated ascending degrees; reports the smallest meeting epsilon.
    #[arg(long)]
    t_grid: Option<String>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// L1 evaluation samples per row.
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
    /// Ambient dimension of the intersection family.
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Radius of the ball family.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GsaCli {
    #[arg(long)]
    set: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    method: GsaMode,
    #[arg(long, default_value = "0.1,0.05,0.025")]
    delta_list: String,
    /// Samples per width.
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Construct(a) => construct_cmd(&ConstructArgs {
            gamma: a.gsa.choice(a.seed)?,
            set: a.set,
            epsilon: a.epsilon,
            method: a.method.map(Into::into),
            budget: a.budget,
            seed: a.seed,
            out: a.out,
        }),
        Command::Check(a) => check_cmd(&CheckArgs {
            poly: a.poly,
            set: a.set,
            checks: a.checks,
            epsilon: a.epsilon,
            n: a.n,
            seed: a.seed,
        }),
        Command::Sweep(a) => {
            let family = match a.family {
                FamilyArg::IntersectionM => Family::IntersectionM,
                FamilyArg::BallD => Family::BallD,
                FamilyArg::Epsilon => Family::Epsilon,
            };
            let mut opts = SweepOptions::new(family, parse_list(&a.range, "range")?);
            opts.epsilon = a.epsilon;
            opts.set = match &a.set {
                Some(p) => Some(nonneg_approx_cli::SetSpec::load(p)?.to_set()?),
                None => None,
            };
            opts.gamma = a.gsa.choice(a.seed)?;
            opts.t_grid = a.t_grid.as_deref().map(|g| parse_list(g, "t grid")).transpose()?;
            opts.method = a.method.map(Into::into);
            opts.budget = a.budget;
            opts.seed = a.seed;
            opts.l1_samples = a.n;
            opts.intersection_dim = a.dim;
            opts.ball_radius = a.radius;
            sweep_cmd(&opts, a.out.as_ref())
        }
        Command::Gsa(a) => gsa_cmd(&GsaArgs {
            set: a.set,
            gamma: GammaChoice {
                mode: a.method,
                supplied: None,
                deltas: parse_list(&a.delta_list, "delta list")?,
                samples: a.n,
                seed: a.seed,
            },
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(ExitStatus::InvalidInput.code() as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            ExitCode::from(outcome.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status.code() as u8)
        }
    }
}
