//! `drift-gauntlet`: construct, certify and attack two-window drift detectors.
//!
//! Exit codes: 0 success (no alarm), 2 no adversarial exists or the scheme
//! has no window pair, 3 drift alerted, 4 input or usage error, 5 an
//! experiment matched the theoretical mask in fewer cells than its floor.

mod commands;
mod specs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::parser::ValueSource;
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use drift_gauntlet::{Error, DEFAULT_SEED};

#[derive(Parser, Debug)]
#[command(
    name = "drift-gauntlet",
    version,
    about = "Drift adversarials for two-window detectors"
)]
pub struct Cli {
    /// Seed for every random choice; falls back to DRIFT_GAUNTLET_SEED, then 1729.
    #[arg(long, global = true, env = "DRIFT_GAUNTLET_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// JSON configuration file (experiment settings).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the main output here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Args, Debug, Clone)]
pub struct KernelArgs {
    /// Kernel of the MMD test.
    #[arg(long, value_enum, default_value_t = KernelKind::Rbf)]
    pub kernel: KernelKind,
    /// RBF bandwidth; the median pairwise distance when omitted.
    #[arg(long)]
    pub bandwidth: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    Rbf,
    Linear,
}

#[derive(Args, Debug, Clone)]
pub struct DetectArgs {
    /// Stream file (JSON lines) to test.
    pub input: PathBuf,
    /// Alarm threshold on the p-value.
    #[arg(long, default_value_t = 0.05)]
    pub theta: f64,
    /// Permutations per window pair.
    #[arg(long, default_value_t = 500)]
    pub permutations: usize,
    /// Evaluate every `stride`-th split time.
    #[arg(long)]
    pub stride: Option<usize>,
    #[command(flatten)]
    pub kernel: KernelArgs,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build an adversarial profile and sample a stream from it.
    Generate {
        /// Scheme to hide from (solved via its weight matrix, or used to
        /// certify a family).
        #[arg(long, required_unless_present = "family")]
        scheme: Option<String>,
        /// Closed-form family instead of a solve.
        #[arg(long)]
        family: Option<String>,
        /// Stream length.
        #[arg(long)]
        n: usize,
        /// Two-squares drift intensity.
        #[arg(long, default_value_t = 5.0)]
        intensity: f64,
        #[arg(long)]
        stride: Option<usize>,
        /// Round a solved profile to 0/1 entries.
        #[arg(long)]
        binarize: bool,
    },
    /// Run the two-window MMD detector on a stream.
    Detect {
        #[command(flatten)]
        args: DetectArgs,
        #[arg(long)]
        scheme: String,
    },
    /// Check a profile or a profile function against a scheme.
    Verify {
        /// Profile JSON (as written next to generated streams) or a stream file.
        #[arg(long, conflicts_with = "function", required_unless_present = "function")]
        profile: Option<PathBuf>,
        /// Continuous profile function as JSON.
        #[arg(long)]
        function: Option<PathBuf>,
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        stride: Option<usize>,
        /// First and last split time checked for a function.
        #[arg(long, num_args = 2, value_names = ["T0", "T1"])]
        span: Option<Vec<f64>>,
        #[arg(long, default_value_t = drift_gauntlet::adversary::DEFAULT_GRID_POINTS)]
        grid_points: usize,
        #[arg(long, default_value_t = drift_gauntlet::adversary::DEFAULT_QUAD_PANELS)]
        panels: usize,
    },
    /// Basis of the difference-row null space of a scheme.
    Nullspace {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Run the detector on the union of several schemes.
    Combine {
        #[command(flatten)]
        args: DetectArgs,
        /// Member schemes (repeat the flag).
        #[arg(long = "scheme", required = true)]
        schemes: Vec<String>,
    },
    /// Reproduce the datasets x schemes benchmark grid.
    Experiment {
        /// Built-in configuration used when --config is absent.
        #[arg(long, value_enum, default_value_t = Preset::Desk)]
        preset: Preset,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        permutations: Option<usize>,
        #[arg(long)]
        stride: Option<usize>,
        #[arg(long)]
        intensity: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        /// Also write the full table (every run's minimal p-value) as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Desk,
    Paper,
}

pub const EXIT_NO_ADVERSARIAL: u8 = 2;
pub const EXIT_ALERT: u8 = 3;
pub const EXIT_INPUT: u8 = 4;
pub const EXIT_BELOW_FLOOR: u8 = 5;

fn exit_code(err: &anyhow::Error) -> u8 {
    let core = err.chain().find_map(|e| e.downcast_ref::<Error>()).map(Error::root);
    match core {
        Some(Error::NoAdversarialExists | Error::EmptyScheme { .. }) => EXIT_NO_ADVERSARIAL,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let parsed = Cli::command()
        .try_get_matches()
        .and_then(|m| Ok((Cli::from_arg_matches(&m)?, m.value_source("seed"))));
    let (cli, seed_source) = match parsed {
        Ok(parsed) => parsed,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let seed_explicit = seed_source != Some(ValueSource::DefaultValue);
    match commands::run(cli, seed_explicit) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("drift-gauntlet: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
