//! Command-line front end for mobwalk experiments.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 censoring budget
//! exhausted, 3 a check suite failed.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;

use clap::Parser;

pub use config::{Cli, CommandKind, ExperimentConfig, Format};
pub use error::CliError;
pub use output::{emit_plot_data, PlotSeries};

/// Parses `argv` (program name first), runs the experiment and returns the
/// process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("mobwalk: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = ExperimentConfig::resolve(cli.flags)?;
    let seed = cfg.seed_or(std::env::var(config::SEED_VAR).ok().as_deref())?;
    let produced = match cfg.workers {
        Some(0) => return Err(CliError::Config("--workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(|| commands::execute(cli.command, &cfg, seed))?,
        None => commands::execute(cli.command, &cfg, seed)?,
    };
    output::write_output(cfg.out.as_deref(), &produced.main)?;
    commands::write_plot(&cfg, &produced)?;
    produced.status
}
