//! `rieffel`: runs the identity, mollifier and conjecture suites on one grid
//! configuration and writes their reports.
//!
//! Exit status is 0 when every gate passes, 2 when a gate fails, 64 on a usage
//! error (bad flags or config) and 1 when a run aborts on an I/O or numerical
//! error. `RIEFFEL_THREADS` sets the worker thread count.

mod config;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::json;

use config::ExperimentConfig;
use report::{Emit, Writer};

const EXIT_GATE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const THREADS_VAR: &str = "RIEFFEL_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Identities,
    Mollifier,
    Conjecture,
    All,
}

#[derive(Debug, Parser)]
#[command(name = "rieffel", version, about = "Deformed-product identity, mollifier and conjecture suites")]
struct Cli {
    /// Flat key = value config file; every key has a default.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory, overriding `out` in the config.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Ensemble seed, overriding `seed` in the config.
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    /// Format of the report tables; the run summary is always JSON.
    #[arg(long, value_enum, default_value = "csv")]
    emit: Emit,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("rieffel: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn threads() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_VAR} must be a positive integer, got {v:?}")),
        },
        Err(e) => Err(format!("{THREADS_VAR}: {e}")),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let mut cfg = match &cli.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(cfg) => cfg,
            Err(e) => return usage(e),
        },
        None => ExperimentConfig::defaults(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.out = out;
    }
    match threads() {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                return usage(e);
            }
        }
        Ok(None) => {}
        Err(e) => return usage(e),
    }

    match run(&cfg, cli.suite, cli.emit) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_GATE),
        Err(e) => {
            eprintln!("rieffel: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cfg: &ExperimentConfig, suite: Suite, emit: Emit) -> rieffel_core::Result<bool> {
    let mut out = Writer::new(&cfg.out, emit)?;
    let chosen: Vec<Suite> = match suite {
        Suite::All => vec![Suite::Identities, Suite::Mollifier, Suite::Conjecture],
        s => vec![s],
    };
    let mut outcomes = Vec::new();
    for s in chosen {
        let outcome = match s {
            Suite::Identities => suites::identities(cfg, &mut out)?,
            Suite::Mollifier => suites::mollifier(cfg, &mut out)?,
            Suite::Conjecture => suites::conjecture(cfg, &mut out)?,
            Suite::All => unreachable!(),
        };
        let status = if outcome.pass { "pass" } else { "FAIL" };
        println!("{:<11} {status}", outcome.suite);
        for name in &outcome.failures {
            println!("  failed: {name}");
        }
        outcomes.push(outcome);
    }
    let pass = outcomes.iter().all(|o| o.pass);
    let files = out.written().to_vec();
    out.json(
        "summary.json",
        &json!({
            "pass": pass,
            "config": cfg,
            "suites": outcomes,
            "files": files,
        }),
    )?;
    Ok(pass)
}
