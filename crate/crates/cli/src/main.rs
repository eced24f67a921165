use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use egt_roots::experiment::{
    emit_plot, parse_d_range, run_experiment, Command, ExperimentConfig, PlotSpec, OUT_DIR_ENV,
};
use egt_roots::sampling::{CoefficientDistribution, SamplingScheme};

/// Count internal equilibria of random evolutionary games.
#[derive(Debug, Parser)]
#[command(name = "egt-roots", version)]
struct Args {
    /// expected-count, variance-scan, clt-check, distribution, pm-analytic,
    /// universality, symmetric-compare or sample-game
    #[arg(long)]
    command: Command,
    /// Strategies per player
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// A single group size
    #[arg(long, conflicts_with = "d_range")]
    d: Option<usize>,
    /// Group sizes, e.g. `2,3,5` or `20-25`
    #[arg(long)]
    d_range: Option<String>,
    /// gaussian, rademacher or uniform
    #[arg(long)]
    dist: Option<CoefficientDistribution>,
    /// aggregateA, payoffB or scaledKSS
    #[arg(long)]
    scheme: Option<SamplingScheme>,
    /// Symmetric two-strategy games
    #[arg(long)]
    symmetric: bool,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; results do not depend on it
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output directory
    #[arg(long, env = OUT_DIR_ENV, default_value = "results")]
    out: PathBuf,
    /// Quadrature tolerance (pm-analytic) or root-matching tolerance
    #[arg(long)]
    tolerance: Option<f64>,
    /// Also write an SVG chart next to the CSV
    #[arg(long)]
    plot: bool,
}

fn run(args: Args) -> egt_roots::Result<()> {
    let ds = match (&args.d, &args.d_range) {
        (Some(d), _) => vec![*d],
        (None, Some(r)) => parse_d_range(r)?,
        (None, None) => vec![],
    };
    let cfg = ExperimentConfig {
        command: args.command,
        n: args.n,
        ds,
        dist: args.dist,
        scheme: args.scheme,
        symmetric: args.symmetric,
        samples: args.samples,
        seed: args.seed,
        tolerance: args.tolerance,
        workers: args.workers,
        out: args.out,
    };
    let out = run_experiment(&cfg)?;
    println!("{}", out.csv.display());
    println!("{}", out.json.display());
    if args.plot {
        if let Some(spec) = PlotSpec::for_command(cfg.command) {
            println!("{}", emit_plot(&out.csv, &spec)?.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
