//! Batch front end for laurent-sieve: subcommands run verification pipelines and emit
//! versioned JSON reports (plus CSV witness tables).
//!
//! Exit codes: 0 when every check passes, 1 when one fails, 2 on usage or configuration errors.

pub mod checks;
pub mod commands;
pub mod config;
pub mod report;
pub mod suite;

use std::ffi::OsString;

use clap::Parser;
use thiserror::Error;

use config::{Cli, CommandConfig};
use report::ReportDoc;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Io(String),
}

pub const THREADS_ENV: &str = "LAURENT_SIEVE_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Resolves the configuration, runs the pipeline and writes the outputs.
pub fn execute(cli: &Cli) -> Result<ReportDoc, CliError> {
    let cfg = CommandConfig::resolve(&cli.command)?;
    configure_threads()?;
    let doc = commands::dispatch(&cfg)?;
    match &cfg.out {
        Some(p) => doc.write_json(p)?,
        None => print!("{}", doc.to_json()),
    }
    if let Some(p) = &cfg.csv {
        doc.write_csv(p)?;
    }
    Ok(doc)
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(doc) if doc.pass => 0,
        Ok(doc) => {
            for r in doc.records.iter().filter(|r| !r.pass) {
                eprintln!("FAILED {}", r.name);
            }
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
