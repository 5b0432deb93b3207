use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use ipset_cli::{emit, parse_problem, run, CliError, Command, Flags, Format};
use ipset_core::reputation::Sense;

#[derive(Parser)]
#[command(
    name = "ipset",
    version,
    about = "Interim payoff sets: membership, boundaries, set approximation and extensions"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Number of sampled directions for sweeps.
    #[arg(long, global = true, value_name = "K")]
    directions: Option<usize>,

    /// Lattice resolution of the belief grid (steps per simplex edge).
    #[arg(long, global = true, value_name = "R")]
    grid: Option<usize>,

    /// Tolerance for probability vectors that do not sum to one.
    #[arg(long, global = true, value_name = "T")]
    tol: Option<f64>,

    /// Seed for sampled directions and random restarts.
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,

    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Record wall-clock time in the output.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SenseArg {
    Max,
    Min,
}

#[derive(Subcommand)]
enum Cmd {
    /// Test whether a profile lies in the closure of the set.
    Membership {
        spec: PathBuf,
        /// Comma-separated profile, one entry per type or cohort.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        target: Vec<f64>,
    },
    /// Support value and boundary profile in one direction.
    Boundary {
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        direction: Vec<f64>,
    },
    /// Inner and outer polyhedral approximation of the set.
    Set { spec: PathBuf },
    /// Cautious persuasion: maximize the worst type's payoff.
    Maxmin { spec: PathBuf },
    /// Equal-payoff interval of communication equilibria.
    Commeq { spec: PathBuf },
    /// Best (or worst) reputation of one type under bi-pooling.
    Bipool {
        spec: PathBuf,
        /// Target type, counted from 0.
        #[arg(long)]
        target: usize,
        #[arg(long, value_enum, default_value = "max")]
        sense: SenseArg,
    },
    /// Sets of a cohort problem or of every member of a noisy-type family.
    CohortSet { spec: PathBuf },
    /// Per-direction attainment, plus structure, CP and Markov checks for linear payoffs.
    Diagnose {
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        direction: Option<Vec<f64>>,
    },
    /// Reduce an information structure to at most 2N-1 signals.
    Reduce {
        spec: PathBuf,
        /// Likelihood rows as JSON, e.g. '[[0.2,0.4,0.4],[0,0.2,0.8]]'.
        #[arg(long)]
        pi: String,
    },
}

fn split(cmd: Cmd) -> (PathBuf, Command) {
    match cmd {
        Cmd::Membership { spec, target } => (spec, Command::Membership { target }),
        Cmd::Boundary { spec, direction } => (spec, Command::Boundary { direction }),
        Cmd::Set { spec } => (spec, Command::Set),
        Cmd::Maxmin { spec } => (spec, Command::Maxmin),
        Cmd::Commeq { spec } => (spec, Command::Commeq),
        Cmd::Bipool { spec, target, sense } => {
            let sense = match sense {
                SenseArg::Max => Sense::Max,
                SenseArg::Min => Sense::Min,
            };
            (spec, Command::Bipool { target, sense })
        }
        Cmd::CohortSet { spec } => (spec, Command::CohortSet),
        Cmd::Diagnose { spec, direction } => (spec, Command::Diagnose { direction }),
        Cmd::Reduce { spec, pi } => (spec, Command::Reduce { pi }),
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let (path, command) = split(cli.command);
    let spec = parse_problem(&path, cli.tol)?;
    for w in &spec.warnings {
        eprintln!("warning: {w}");
    }
    let flags = Flags {
        directions: cli.directions,
        grid: cli.grid,
        seed: cli.seed,
    };
    let mut bundle = run(&spec, &path.display().to_string(), &command, &flags)?;
    if cli.timing {
        bundle.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    let text = emit(&bundle, cli.format)?;
    match &cli.out {
        Some(out) => std::fs::write(out, text).map_err(|source| CliError::Io {
            path: out.display().to_string(),
            source,
        })?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
