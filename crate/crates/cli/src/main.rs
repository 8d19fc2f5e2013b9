use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod manifest;
mod report;

use manifest::Manifest;

#[derive(Debug, Parser)]
#[command(name = "polyurn", version, about = "Pólya urns on hypergraphs: analysis, simulation, flows and plots")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Hypergraph JSON file, or `builtin:<name>` (e.g. `builtin:cube`, `builtin:path(3)`)
    #[arg(long, global = true)]
    hypergraph: Option<String>,
    /// Output directory, created if missing
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print the main JSON result to stdout instead of a short summary
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kernel, equilibria, spectra, pendants and verdict; writes analysis.json
    Analyze(commands::AnalyzeArgs),
    /// Monte Carlo replicas of the urn; writes trajectories.csv and summary.json
    Simulate(commands::SimulateArgs),
    /// Integrates the mean-field flow; writes flow.csv
    Flow(commands::FlowArgs),
    /// SVG charts and a markdown summary from trajectory or flow CSVs
    Report(report::ReportArgs),
}

/// Exit code 1: bad input or configuration. Exit code 2: the computation
/// itself failed (no convergence, flow left its domain).
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 1, error: error.into() }
    }

    pub fn compute(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 2, error: error.into() }
    }
}

pub type CmdResult = Result<(), Failure>;

fn configure_threads() {
    let Some(n) = std::env::var("POLYURN_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) else {
        return;
    };
    if n > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    if let Err(e) = std::fs::create_dir_all(&cli.common.out) {
        eprintln!("error: cannot create {}: {e}", cli.common.out.display());
        return ExitCode::from(1);
    }
    let mut manifest = Manifest::new(&cli.common.out);
    let result = match &cli.command {
        Command::Analyze(a) => commands::analyze(&cli.common, a, &mut manifest),
        Command::Simulate(a) => commands::simulate(&cli.common, a, &mut manifest),
        Command::Flow(a) => commands::flow(&cli.common, a, &mut manifest),
        Command::Report(a) => report::run(&cli.common, a, &mut manifest),
    };
    let code = match &result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            f.code
        }
    };
    if manifest.armed() {
        manifest.finish(result.as_ref().err().map(|f| format!("{:#}", f.error)));
        if let Err(e) = manifest.write() {
            eprintln!("error: cannot write manifest: {e:#}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code)
}
