use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use potlab::config::REFERENCE;
use potlab::{Run, RunConfig};

#[derive(Parser)]
#[command(
    name = "potlab",
    version,
    about = "Boundary Harnack and 3G experiments on graphs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// TOML configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated property names; an empty string selects nothing.
    #[arg(long, global = true)]
    select: Option<String>,
    #[arg(long, global = true)]
    budget_vertices: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Generate domains and write edge-list graphs.
    Gen,
    /// Compute (or load cached) Green tables.
    Green,
    /// Run the selected property sweeps and the dashboard.
    Verify,
    /// Run the conditional-gauge pipeline.
    Gauge,
    /// Merge all reports into one CSV and a summary.
    Report,
    /// Print every configuration key with its default.
    Defaults,
}

fn run(cli: Cli) -> potlab::Result<()> {
    if let Cmd::Defaults = cli.cmd {
        print!("{REFERENCE}");
        return Ok(());
    }
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = cli.out {
        cfg.out = o;
    }
    if let Some(s) = cli.select {
        cfg.select = s
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
    }
    if let Some(b) = cli.budget_vertices {
        cfg.budget_vertices = b;
    }
    let mut run = Run::new(cfg)?;
    let files = match cli.cmd {
        Cmd::Gen => run.cmd_gen()?,
        Cmd::Green => run.cmd_green()?,
        Cmd::Verify => run.cmd_verify()?,
        Cmd::Gauge => run.cmd_gauge()?,
        Cmd::Report => run.cmd_report()?,
        Cmd::Defaults => unreachable!(),
    };
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
