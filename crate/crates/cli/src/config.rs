//! Run configuration: per-command defaults, config-file overrides and flag overrides,
//! merged into one fully explicit [`RunConfig`] that is echoed into every artifact.

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Gen,
    Scatter,
    Flow,
    Verify,
}

impl Command {
    /// Process exit code used when the command itself fails.
    pub fn failure_code(self) -> i32 {
        match self {
            Command::Gen => 2,
            Command::Scatter => 3,
            Command::Flow => 4,
            Command::Verify => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Symbolic,
    Scattering,
    Flows,
    All,
}

/// Every parameter of a run, with nothing left implicit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub family: String,
    pub n: usize,
    pub tau0: f64,
    /// Spectral parameter of the τ-flow.
    pub tau: f64,
    pub potential: Vec<String>,
    pub z: Vec<String>,
    pub grid: usize,
    pub period: f64,
    pub dt: f64,
    pub t_end: f64,
    pub sample_every: usize,
    pub tol_ode: f64,
    pub tol_residual: f64,
    /// Largest admissible `|u|` at the ends of a truncated line.
    pub tail_tol: f64,
    pub out: String,
    pub suite: Suite,
    pub seed: u64,
    pub det2: bool,
    pub det2_grid: usize,
    pub remainder: Option<i64>,
    pub z_ray: Vec<f64>,
    pub intertwining: bool,
    pub fast: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inject_fault: Option<String>,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        let mut c = RunConfig {
            command,
            family: "kdv".into(),
            n: 3,
            tau0: 2.0,
            tau: 2.0,
            potential: vec!["sech:a=0.5".into()],
            z: vec!["0+2i".into()],
            grid: 4001,
            period: 2.0 * std::f64::consts::PI,
            dt: 1e-4,
            t_end: 1.0,
            sample_every: 100,
            tol_ode: 1e-13,
            tol_residual: 1e-6,
            tail_tol: 1e-13,
            out: "out".into(),
            suite: Suite::All,
            seed: 0,
            det2: false,
            det2_grid: 2048,
            remainder: None,
            z_ray: vec![4.0, 8.0, 16.0, 32.0],
            intertwining: false,
            fast: false,
            inject_fault: None,
        };
        if command == Command::Flow {
            c.family = "gardner".into();
            c.n = 1;
            c.potential = vec!["fourier:c1=0.3,c2=0.1".into()];
            c.grid = 256;
        }
        c
    }

    /// Defaults, then the config file, then explicit flags.
    pub fn resolve(command: Command, config_file: Option<&Path>, flags: &Overrides) -> Result<Self> {
        let mut c = RunConfig::defaults(command);
        if let Some(path) = config_file {
            Overrides::load(path)?.apply(&mut c);
        }
        flags.apply(&mut c);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol_ode > 0.0 && self.tol_residual > 0.0 && self.tail_tol > 0.0) {
            bail!("tolerances must be positive");
        }
        if self.potential.is_empty() || self.z.is_empty() {
            bail!("at least one potential and one z are required");
        }
        if !(self.dt > 0.0 && self.t_end > 0.0 && self.period > 0.0) || self.sample_every == 0 {
            bail!("dt, t_end, period and sample_every must be positive");
        }
        Ok(())
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(&self.out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("configs serialize")
    }
}

fn parse_remainder(s: &str) -> std::result::Result<i64, String> {
    let t = s.trim();
    let t = t.strip_prefix("N=").or_else(|| t.strip_prefix("n=")).unwrap_or(t);
    t.parse().map_err(|_| format!("expected `N=<int>` or `<int>`, got `{s}`"))
}

/// Optional settings shared by the config file and the command line.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Hierarchy or flow family.
    #[arg(long)]
    pub family: Option<String>,
    /// Order N.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub tau0: Option<f64>,
    /// Spectral parameter of the τ-flow.
    #[arg(long)]
    pub tau: Option<f64>,
    /// `name:key=value,...` or `csv:path` (repeatable).
    #[arg(long)]
    pub potential: Option<Vec<String>>,
    /// Spectral point `re+imi` (repeatable).
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<Vec<String>>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub period: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub sample_every: Option<usize>,
    /// Relative tolerance of the adaptive ODE solver.
    #[arg(long)]
    pub tol_ode: Option<f64>,
    /// Largest admissible residual of cross-checks.
    #[arg(long)]
    pub tol_residual: Option<f64>,
    #[arg(long)]
    pub tail_tol: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Add the Fredholm-determinant cross-check.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub det2: Option<bool>,
    #[arg(long)]
    pub det2_grid: Option<usize>,
    /// Remainder study `N=<int>` along the ray `z = iτ`.
    #[arg(long, value_parser = parse_remainder)]
    #[serde(default, deserialize_with = "remainder_field")]
    pub remainder: Option<i64>,
    /// Values of τ for the remainder study, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub z_ray: Option<Vec<f64>>,
    /// Run the Miura and good-variable intertwining check.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub intertwining: Option<bool>,
    /// Reduced problem sizes.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub fast: Option<bool>,
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}

fn remainder_field<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<i64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum R {
        Int(i64),
        Text(String),
    }
    match Option::<R>::deserialize(d)? {
        None => Ok(None),
        Some(R::Int(n)) => Ok(Some(n)),
        Some(R::Text(s)) => parse_remainder(&s).map(Some).map_err(serde::de::Error::custom),
    }
}

impl Overrides {
    /// Reads a TOML file, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
        } else {
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
        }
    }

    pub fn apply(&self, c: &mut RunConfig) {
        macro_rules! set {
            ($($f:ident),*) => {$(
                if let Some(v) = &self.$f {
                    c.$f = v.clone();
                }
            )*};
        }
        set!(family, n, tau0, tau, potential, z, grid, period, dt, t_end, sample_every, tol_ode, tol_residual, tail_tol);
        set!(out, suite, seed, det2, det2_grid, z_ray, intertwining, fast);
        if self.remainder.is_some() {
            c.remainder = self.remainder;
        }
        if self.inject_fault.is_some() {
            c.inject_fault = self.inject_fault.clone();
        }
    }
}
