use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use chdg_cli::config::RunConfig;
use chdg_cli::driver;
use clap::{Parser, Subcommand};

/// DG, HDG and CHDG solvers for the time-harmonic acoustic benchmarks.
#[derive(Parser)]
#[command(name = "chdg", version)]
struct Cli {
    /// Worker threads for element-parallel work (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration and write its history CSV and summary.
    Run {
        config: Option<PathBuf>,
        /// `key=value` overrides applied after the file.
        #[arg(short = 's', long = "set")]
        set: Vec<String>,
    },
    /// Run several configurations on one benchmark and align their histories.
    Sweep {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        #[arg(short = 's', long = "set")]
        set: Vec<String>,
    },
    /// Spectral radius of the CHDG iteration matrix.
    Spectra {
        config: Option<PathBuf>,
        #[arg(short = 's', long = "set")]
        set: Vec<String>,
    },
    /// Counts and sizes of a mesh given by a config or an MSH file.
    MeshInfo {
        /// A config file, or an `.msh` file.
        input: Option<PathBuf>,
        #[arg(short = 's', long = "set")]
        set: Vec<String>,
    },
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn main_inner(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run { config, set } => {
            let cfg = RunConfig::load(config.as_deref(), &set)?;
            init_threads(cli.threads.or(cfg.threads))?;
            let outcome = driver::run(&cfg)?;
            print!("{}", driver::summary_text(&outcome));
            Ok(outcome.status.exit_code())
        }
        Command::Sweep { configs, set } => {
            let loaded = configs
                .iter()
                .map(|p| RunConfig::load(Some(p), &set))
                .collect::<Result<Vec<_>>>()?;
            init_threads(cli.threads.or(loaded.first().and_then(|c| c.threads)))?;
            let expanded = driver::expand_variants(loaded)?;
            let result = driver::sweep(&expanded)?;
            for o in &result.outcomes {
                println!(
                    "{:<28} status={:<13} iterations={:<6} final_error={}",
                    o.config.name,
                    o.status.name(),
                    o.history.len().saturating_sub(1),
                    o.final_error.map_or("n/a".into(), |e| format!("{e:.6e}"))
                );
            }
            Ok(0)
        }
        Command::Spectra { config, set } => {
            let cfg = RunConfig::load(config.as_deref(), &set)?;
            init_threads(cli.threads.or(cfg.threads))?;
            let (est, dim) = driver::spectra(&cfg)?;
            print!("{}", driver::spectra_report(&est, dim));
            Ok(0)
        }
        Command::MeshInfo { input, set } => {
            init_threads(cli.threads)?;
            let mesh = match &input {
                Some(p) if p.extension().is_some_and(|e| e == "msh") => chdg::mesh::read_msh(p)?,
                _ => driver::build_mesh(&RunConfig::load(input.as_deref(), &set)?)?,
            };
            print!("{}", driver::mesh_info(&mesh));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
