//! `dilationlab`: runs one configured experiment and writes CSV + JSON reports.

mod config;
mod experiments;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use config::{Diagnostic, Experiment, Overrides};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration")]
    Config(Vec<Diagnostic>),
    #[error("cannot write {0}: {1}")]
    Output(PathBuf, String),
    #[error("setup failed: {0}")]
    Setup(#[from] dilationlab::Error),
}

const AFTER_HELP: &str = "\
CSV columns (every file starts with `cell` and ends with `passed`):
  dilate-discrete    word,M,residual
  dilate-continuous  word,M,residual
  poly-transport     word,M,lambda,degree,residual,tail_bound_sum,yosida_word_residual
  chernoff           N,error
  feynman            N,error
  monitor            partition,N,cocycle_residual,diagonal_residual
  reduce             partition,M,residual,truncation_residual,snap_distance
  wordcheck          word,reduced,expansions,mismatches,homomorphism_residual
  spectrum           member,M,eigenvalues,max_transfer_residual
Per-cell runtimes are in the JSON report only, so the CSV is byte-identical across runs.

Environment:
  DILATIONLAB_THREADS  upper bound on worker threads

Exit status: 0 all cells pass, 1 numerical failure, 2 configuration error.";

#[derive(Debug, Parser)]
#[command(name = "dilationlab", version, about = "Free dilation and monitored-evolution experiments", after_help = AFTER_HELP)]
struct Args {
    /// One of: dilate-discrete, dilate-continuous, poly-transport, chernoff, feynman, monitor, reduce, wordcheck, spectrum
    experiment: String,
    /// TOML experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for <experiment>.csv and <experiment>.json.
    #[arg(long)]
    out: PathBuf,
    /// Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `tol` in the config.
    #[arg(long)]
    tol: Option<f64>,
    /// Overrides `depths`, e.g. `--depth 8,16,24`.
    #[arg(long, value_delimiter = ',')]
    depth: Option<Vec<usize>>,
    /// Validate the config and exit without running.
    #[arg(long)]
    check: bool,
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("DILATIONLAB_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(vec![Diagnostic {
                path: "DILATIONLAB_THREADS".into(),
                message: format!("expected a positive integer, got `{v}`"),
            }])),
        },
    }
}

fn config_error(path: &str, message: impl Into<String>) -> CliError {
    CliError::Config(vec![Diagnostic {
        path: path.into(),
        message: message.into(),
    }])
}

fn run(args: &Args) -> Result<bool, CliError> {
    let experiment: Experiment = args.experiment.parse().map_err(|e: String| config_error("experiment", e))?;
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| config_error("--config", format!("{}: {e}", args.config.display())))?;
    let raw = config::parse_toml(&text).map_err(|d| CliError::Config(vec![d]))?;
    let overrides = Overrides {
        seed: args.seed,
        tol: args.tol,
        depths: args.depth.clone(),
    };
    if args.check {
        let diags = config::validate(experiment, &raw, &overrides);
        if !diags.is_empty() {
            return Err(CliError::Config(diags));
        }
        println!("{experiment}: config is valid");
        return Ok(true);
    }
    let plan = config::build_plan(experiment, &raw, &overrides).map_err(CliError::Config)?;

    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let threads = thread_cap()?.map_or(available, |cap| cap.min(available));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");

    let ctx = experiments::context(&plan)?;
    let rows = pool.install(|| experiments::run_all(&plan, &ctx));
    let written = report::write(&plan, &rows, &args.out)?;

    let failed: Vec<_> = rows.iter().filter(|r| !r.passed).collect();
    for r in &failed {
        match &r.error {
            Some(e) => eprintln!("cell {} failed: {e}", r.cell),
            None => eprintln!("cell {} failed: residual {:e} (tol {:e})", r.cell, r.residual, plan.tol),
        }
    }
    println!(
        "{}: {} cells, {} failed; wrote {} and {}",
        experiment,
        rows.len(),
        failed.len(),
        written.csv.display(),
        written.json.display()
    );
    Ok(failed.is_empty())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Config(diags)) => {
            for d in diags {
                eprintln!("config error: {d}");
            }
            ExitCode::from(2)
        }
        Err(e @ CliError::Output(..)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e @ CliError::Setup(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
