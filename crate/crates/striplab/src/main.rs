use clap::{Parser, Subcommand};
use std::path::PathBuf;
use striplab::config::{parse_config, ExperimentKind, RunConfig};
use striplab::experiment;

/// Spectral and time-domain decay experiments for shear-deformed strips.
///
/// Exit codes: 0 all claims pass, 1 at least one claim failed, 2 the
/// configuration or an output path was unusable.
#[derive(Parser)]
#[command(name = "striplab", version, about, long_about = None)]
struct Cli {
    /// TOML configuration file; built-in defaults apply when omitted.
    /// The subcommand overrides the file's `experiment` field.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory override; the directory must already exist.
    #[arg(long, global = true)]
    out: Option<String>,

    /// Seed override for solver start vectors.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Confinement ladder of the scaled-limit line operator.
    Oscillator,
    /// Weighted spectral-gap sweep over truncation extents.
    Hardy,
    /// Ground curve of the scaled operator family.
    MuCurve,
    /// Heat-flow traces, power-law fits, and envelope comparison.
    Evolve,
    /// Every experiment plus cross-route sanity rows.
    FullReport,
    /// Print the default configuration as TOML and exit.
    PrintConfig,
}

impl Command {
    fn kind(&self) -> Option<ExperimentKind> {
        match self {
            Command::Oscillator => Some(ExperimentKind::Oscillator),
            Command::Hardy => Some(ExperimentKind::Hardy),
            Command::MuCurve => Some(ExperimentKind::MuCurve),
            Command::Evolve => Some(ExperimentKind::Evolve),
            Command::FullReport => Some(ExperimentKind::FullReport),
            Command::PrintConfig => None,
        }
    }
}

fn main() {
    std::process::exit(run_cli());
}

fn run_cli() -> i32 {
    let cli = Cli::parse();
    let Some(kind) = cli.command.kind() else {
        print!("{}", RunConfig::default().to_toml());
        return 0;
    };

    let mut cfg = match &cli.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    return 2;
                }
            };
            match parse_config(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            }
        }
        None => RunConfig::default(),
    };
    cfg.experiment = kind;
    if let Some(out) = cli.out {
        cfg.output.directory = out;
    }
    if let Some(seed) = cli.seed {
        cfg.solver.seed = seed;
    }

    match experiment::run(&cfg) {
        Ok(report) => {
            print!("{}", report.render());
            if report.all_pass() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
