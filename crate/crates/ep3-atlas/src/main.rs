//! Batch CLI for exceptional-point analysis of complex symmetric matrix
//! families. Every subcommand is deterministic given its flags (plus
//! `--seed` where randomness is requested) and emits CSV and/or JSON for
//! external plotting; see FORMATS.md at the repository root.
//!
//! Exit codes: 0 success, 1 usage error, 2 computation error (with a
//! machine-readable error JSON on stdout), 3 loop-through-EP.

mod commands;
mod families;
mod output;

use clap::{ArgAction, Args, Parser, Subcommand};
use ep3_core::CoreError;

/// A CLI failure, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or malformed input files (exit 1).
    Usage(String),
    /// A module reported an error during the computation (exit 2, or 3 for
    /// a loop that passes through an EP).
    Computation(CoreError),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> CliError {
        CliError::Usage(msg.into())
    }

    pub fn computation(err: CoreError) -> CliError {
        CliError::Computation(err)
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> CliError {
        CliError::Computation(err)
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> CliError {
        CliError::Usage(format!("io error: {err}"))
    }
}

#[derive(Parser)]
#[command(
    name = "ep3-atlas",
    version,
    about = "Exceptional-point atlas: classify perturbation scenarios, sample \
             spectral sheets, track monodromy loops, fit Puiseux exponents, \
             locate EPs and print Jordan chains",
    after_help = "Output formats and the family-file schema are documented in \
                  FORMATS.md. Exit codes: 0 success, 1 usage error, 2 \
                  computation error, 3 loop-through-EP."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Family selection, shared by every subcommand.
#[derive(Args)]
pub struct FamilyArgs {
    /// waveguide-ab-equal | waveguide-ab-opposite | waveguide-2param |
    /// file:<path> (polynomial family JSON)
    #[arg(long)]
    family: String,
    /// Gain/loss strength for the built-in waveguide families
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Coupling strength for the built-in waveguide families
    #[arg(long, default_value_t = 1.0)]
    v: f64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify the perturbation scenario at an EP and print the Jordan
    /// chain (JSON)
    Classify(ClassifyArgs),
    /// Sample all eigenvalue branches over a complex-parameter grid (CSV)
    Sheet(SheetArgs),
    /// Track eigenvalues and eigenvectors around a closed parameter loop
    /// (CSV trajectory + JSON monodromy summary)
    Loop(LoopArgs),
    /// Fit Puiseux exponents from eigenvalue moduli on shrinking circles
    /// (JSON)
    Fit(FitArgs),
    /// Locate an EP by Newton iteration on root-multiplicity conditions
    /// (JSON)
    FindEp(FindEpArgs),
    /// Build and verify the normalized Jordan chain at an EP (JSON)
    Jordan(JordanArgs),
}

#[derive(Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Parameter value of the EP, as `re,im` (or just `re`)
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    center: String,
    /// Vanishing threshold for the classification scalars (defaults to a
    /// relative threshold scaled by the perturbation and chain norms)
    #[arg(long)]
    tol: Option<f64>,
    /// Output path prefix; writes <prefix>.json instead of stdout
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
pub struct SheetArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Grid resolution as `nx,ny`
    #[arg(long, default_value = "41,41")]
    grid: String,
    /// Grid bounds as `re_min,re_max,im_min,im_max`
    #[arg(long, default_value = "-0.2,0.2,-0.2,0.2", allow_hyphen_values = true)]
    bounds: String,
    /// Output path prefix; writes <prefix>.csv
    #[arg(long)]
    out: String,
}

#[derive(Args)]
pub struct LoopArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Loop center as `re,im` (one-complex-parameter families only)
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    center: String,
    /// Loop radius
    #[arg(long, default_value_t = 0.1)]
    radius: f64,
    /// Samples per parameter cycle (even, >= 64)
    #[arg(long, default_value_t = 512)]
    steps: usize,
    /// Number of parameter cycles
    #[arg(long, default_value_t = 1)]
    cycles: usize,
    /// Traverse the loop clockwise instead of counterclockwise
    #[arg(long, action = ArgAction::SetTrue)]
    reversed: bool,
    /// Output path prefix; writes <prefix>.csv and <prefix>_summary.json
    #[arg(long)]
    out: String,
}

#[derive(Args)]
pub struct FitArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Comma-separated circle radii (sorted internally in descending order)
    #[arg(long, allow_hyphen_values = true)]
    radii: String,
    /// Samples per circle
    #[arg(long, default_value_t = 256)]
    steps: usize,
    /// The EP eigenvalue the branches emanate from, as `re,im`
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    lambda0: String,
    /// Output path prefix; writes <prefix>.json instead of stdout
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
pub struct FindEpArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Requested degeneracy order (2 or 3)
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Initial parameter guess: p floats (real parameters) or 2p floats
    /// (re,im pairs); drawn at random in a radius-0.2 ball when omitted
    #[arg(long, allow_hyphen_values = true)]
    guess: Option<String>,
    /// Initial eigenvalue guess as `re,im`
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    guess_lambda: String,
    /// Convergence threshold on the condition-vector norm
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Newton iteration budget
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    /// RNG seed for the random guess (used only when --guess is omitted)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path prefix; writes <prefix>.json instead of stdout
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
pub struct JordanArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Parameter value of the EP, as `re,im`
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    center: String,
    /// Output path prefix; writes <prefix>.json instead of stdout
    #[arg(long)]
    out: Option<String>,
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Classify(args) => commands::cmd_classify(&args),
        Cmd::Sheet(args) => commands::cmd_sheet(&args),
        Cmd::Loop(args) => commands::cmd_loop(&args),
        Cmd::Fit(args) => commands::cmd_fit(&args),
        Cmd::FindEp(args) => commands::cmd_find_ep(&args),
        Cmd::Jordan(args) => commands::cmd_jordan(&args),
    }
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Computation(err)) => {
            println!("{}", output::error_json(&err));
            if matches!(err, CoreError::EpOnPath { .. }) {
                3
            } else {
                2
            }
        }
    }
}

fn main() {
    std::process::exit(run());
}
