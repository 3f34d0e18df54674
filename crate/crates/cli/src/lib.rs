// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line driver for speed-limit experiments.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

pub use commands::{execute, Command, Metadata, Outcome, RunOptions};
pub use config::{ExperimentConfig, Format};
pub use error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(name = "qsl", version, about = "Geometric quantum speed limits for Lindblad dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML experiment configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output file; a `<path>.meta.json` sidecar is written next to it. Defaults to stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads for sweep points (default 1).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

impl Cli {
    /// Merges flags over the config file. Flags win.
    pub fn options(&self) -> Result<(RunOptions, Option<PathBuf>), CliError> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let seed = self.seed.or(config.seed).unwrap_or(0);
        config.seed = Some(seed);
        let format = self
            .format
            .or(config.output.format)
            .unwrap_or(match self.command {
                Command::Verify => Format::Json,
                _ => Format::Csv,
            });
        config.output.format = Some(format);
        let output = self.output.clone().or_else(|| config.output.path.clone());
        let workers = self.workers.or(config.workers).unwrap_or(1);
        if workers == 0 {
            return Err(CliError::Config("--workers: must be at least 1".into()));
        }
        Ok((RunOptions { config, seed, workers, format }, output))
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match run_inner(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_inner(cli: &Cli) -> Result<i32, CliError> {
    let (opts, output) = cli.options()?;
    let outcome = execute(cli.command, &opts)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    match output {
        Some(path) => {
            output::write_file(&path, &outcome.body)?;
            output::write_file(&output::sidecar_path(&path), &output::to_json_bytes(&outcome.metadata))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&outcome.body)
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
        }
    }
    Ok(outcome.exit_code)
}

pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::OK };
            let _ = e.print();
            code
        }
    }
}
