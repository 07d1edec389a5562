//! `dipolar`: evaluate dipolar isoperimetric energies, closed-form ansatz
//! energies, the disk/stripe crossover and the shape gradient flow.

mod commands;
mod config;
mod emit;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::FileConfig;

#[derive(Parser, Debug)]
#[command(name = "dipolar", version, about = "Regularized dipolar isoperimetric energies in the plane")]
struct Cli {
    /// JSON configuration file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Also write the effective configuration to this path.
    #[arg(long, global = true)]
    dump_config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Energy of a shape under one or all evaluators.
    Energy(EnergyArgs),
    /// Closed-form disk or stripe energy in the layered critical limit.
    Ansatz(AnsatzArgs),
    /// Disk/stripe comparison over a grid of layer separations.
    PhaseScan(PhaseScanArgs),
    /// Area-preserving gradient flow from a starting shape.
    Optimize(OptimizeArgs),
    /// Property suite; exits nonzero on any failed check.
    Verify(VerifyArgs),
}

/// Kernel parameters shared by the energy and flow commands.
#[derive(Args, Debug, Default)]
pub struct ParamArgs {
    /// Dipolar strength λ.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Cutoff length δ in (0, 1/2).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Layer separation l: a positive number or `inf`.
    #[arg(long)]
    pub ell: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvaluatorArg {
    Boundary,
    Grid,
    Gamma,
    GammaModified,
}

#[derive(Args, Debug)]
pub struct EnergyArgs {
    /// disk:r | ellipse:aspect | ellipse:a,b | stripe:a,m,rho | path to a shape JSON file.
    #[arg(long)]
    pub shape: Option<String>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum)]
    pub evaluator: Option<EvaluatorArg>,
    /// Run every applicable evaluator and report consistency deltas.
    #[arg(long)]
    pub all: bool,
    /// Boundary nodes per component (default: curvature-based).
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Grid spacing for the grid evaluator (default δ/8).
    #[arg(long)]
    pub h: Option<f64>,
    /// Output JSON path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnsatzArgs {
    /// disk:r or stripe:a,m.
    #[arg(long)]
    pub shape: Option<String>,
    /// Layer separation l: a positive number or `inf`.
    #[arg(long)]
    pub ell: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PhaseScanArgs {
    /// `start:stop:step` (inclusive) or a comma-separated list.
    #[arg(long = "l")]
    pub l_grid: Option<String>,
    /// Also search the mass threshold M(l) on STRIPE rows.
    #[arg(long)]
    pub threshold: bool,
    /// CSV path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG plot of f_disk and f_stripe against a.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Layer separation for the SVG plot (default: first non-degenerate row).
    #[arg(long)]
    pub plot_ell: Option<f64>,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    /// Starting shape, same syntax as `energy --shape`; one component.
    #[arg(long)]
    pub start: Option<String>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub max_mode: Option<usize>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub dt0: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Trace CSV path (default: stdout).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Final curve in the shape JSON format.
    #[arg(long)]
    pub curve_out: Option<PathBuf>,
    /// SVG of the initial and final curves.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Smaller sample counts and no flow run.
    #[arg(long)]
    pub quick: bool,
    /// Seed for the random shapes.
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON report path.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad or missing arguments: exit 2.
    Usage(String),
    /// A computation failed: exit 1.
    Run(String),
    /// All computations ran but an asserted check failed: exit 1.
    Checks(String),
}

impl From<dipolar_core::Error> for CliError {
    fn from(e: dipolar_core::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let workers = cli.workers.or(file.workers);
    if let Some(n) = workers {
        if n == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Run(e.to_string()))?;
    }
    let ctx = commands::Context { file, workers, dump_config: cli.dump_config };
    match cli.command {
        Command::Energy(a) => commands::energy(&ctx, a),
        Command::Ansatz(a) => commands::ansatz(&ctx, a),
        Command::PhaseScan(a) => commands::phase_scan(&ctx, a),
        Command::Optimize(a) => commands::optimize(&ctx, a),
        Command::Verify(a) => verify::run(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            eprintln!("run `dipolar --help` for usage");
            ExitCode::from(2)
        }
        Err(CliError::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Checks(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
    }
}
