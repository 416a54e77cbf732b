use anyhow::Result;
use clap::{Parser, Subcommand};
use hierarchylab_cli::{run, Command, Overrides, RunConfig, USAGE_EXIT};
use std::path::PathBuf;
use std::process::ExitCode;

/// Symbolic hierarchies, scattering data and flows for KdV-type equations.
#[derive(Parser)]
#[command(name = "hierarchylab", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Generate hierarchy tables as JSON and text.
    Gen(Opts),
    /// Transmission coefficients, generating functions and determinant cross-checks.
    Scatter(Opts),
    /// Evolve initial data and record conservation diagnostics.
    Flow(Opts),
    /// Run verification suites and write a pass/fail report.
    Verify(Opts),
}

#[derive(clap::Args)]
struct Opts {
    /// TOML (or `.json`) file of settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    print_config: bool,
    #[command(flatten)]
    overrides: Overrides,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_EXIT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let (command, opts) = match cli.command {
        Sub::Gen(o) => (Command::Gen, o),
        Sub::Scatter(o) => (Command::Scatter, o),
        Sub::Flow(o) => (Command::Flow, o),
        Sub::Verify(o) => (Command::Verify, o),
    };
    let cfg = match resolve(command, &opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(USAGE_EXIT as u8);
        }
    };
    if opts.print_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("configs serialize"));
        return ExitCode::SUCCESS;
    }
    match run(&cfg) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}

fn resolve(command: Command, opts: &Opts) -> Result<RunConfig> {
    RunConfig::resolve(command, opts.config.as_deref(), &opts.overrides)
}
