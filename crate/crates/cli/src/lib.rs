//! Command implementations behind the `hierarchylab` binary.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

pub use config::{Command, Overrides, RunConfig, Suite};

/// Exit code for malformed flags or configuration.
pub const USAGE_EXIT: i32 = 64;

/// A failed command together with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: USAGE_EXIT, error: error.into() }
    }

    pub fn of(command: Command, error: impl Into<anyhow::Error>) -> Self {
        Failure { code: command.failure_code(), error: error.into() }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

/// Worker pool capped by `HIERARCHYLAB_THREADS` when it is set to a positive integer.
pub fn thread_pool() -> anyhow::Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var("HIERARCHYLAB_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        if n > 0 {
            b = b.num_threads(n);
        }
    }
    Ok(b.build()?)
}

/// Runs the command named in `cfg`, returning a one-line summary.
pub fn run(cfg: &RunConfig) -> Result<String, Failure> {
    match cfg.command {
        Command::Gen => commands::gen::run(cfg),
        Command::Scatter => commands::scatter::run(cfg),
        Command::Flow => commands::flow::run(cfg),
        Command::Verify => verify::run(cfg),
    }
}
