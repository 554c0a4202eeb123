use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use potlab::bundle::write_timing;
use potlab::config::{GreenSection, GridSection, ModelSection, Params};
use potlab::{run_scenario, CliError, Config, Scenario};

#[derive(Parser)]
#[command(name = "potlab", version, about = "Random walks on groups: Green functions, Martin kernels, exit measures")]
struct Cli {
    /// TOML scenario file; command-line values override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for the report bundle.
    #[arg(long, global = true, default_value = "potlab-out")]
    out: PathBuf,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(clap::Args, Default)]
struct Opts {
    #[command(flatten)]
    model: ModelSection,
    #[command(flatten)]
    green: GreenSection,
    #[command(flatten)]
    params: Params,
    #[command(flatten)]
    grid: GridSection,
}

#[derive(Subcommand)]
enum Command {
    /// Word-ball sizes and growth rate.
    Growth(Opts),
    /// Green function brackets and Green-metric balls.
    Green(Opts),
    /// Martin-kernel limit along z, z², … and its classification.
    Martin(Opts),
    /// Deviation G(W_n; x, y) over growing excluded balls.
    Deviation(Opts),
    /// The growth obstruction pipeline and its verdict.
    Obstruct(Opts),
    /// Exact exit measures on a lattice domain.
    Grid(Opts),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let (scenario, opts) = match cli.command {
        Some(Command::Growth(o)) => (Some(Scenario::Growth), o),
        Some(Command::Green(o)) => (Some(Scenario::Green), o),
        Some(Command::Martin(o)) => (Some(Scenario::Martin), o),
        Some(Command::Deviation(o)) => (Some(Scenario::Deviation), o),
        Some(Command::Obstruct(o)) => (Some(Scenario::Obstruct), o),
        Some(Command::Grid(o)) => (Some(Scenario::Grid), o),
        None => (None, Opts::default()),
    };
    cfg.merge(Config {
        scenario,
        seed: cli.seed,
        model: opts.model,
        green: opts.green,
        params: opts.params,
        grid: opts.grid,
    });
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    let bundle = run_scenario(&cfg)?;
    bundle.write(&cli.out)?;
    write_timing(&cli.out, start.elapsed().as_secs_f64())?;
    let report = bundle.report();
    println!("{}: wrote {}", cfg.scenario()?, cli.out.display());
    if let Some(v) = report["results"].get("verdict") {
        println!("verdict: {}", v.as_str().unwrap_or_default());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("potlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
