//! Built-in parameterized fields and CSV ingestion.
//!
//! Specs have the form `name:key=value,key=value`, e.g. `sech:a=0.5` or
//! `gaussian:a=0.3,c=1,l=2`, or `csv:path/to/file.csv` with columns `x,re[,im]`.

use crate::error::{NumericsError, Result};
use crate::grid::{Geometry, GridFunction, C64};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub family: String,
    pub params: BTreeMap<String, f64>,
    /// Path for `csv` specs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

const FAMILIES: [&str; 7] = ["zero", "sech", "sech2", "gaussian", "bump", "twobump", "fourier"];

impl PotentialSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let name = name.trim().to_ascii_lowercase();
        if name == "csv" {
            if rest.is_empty() {
                return Err(NumericsError::Invalid("csv spec needs a path".into()));
            }
            return Ok(PotentialSpec { family: name, params: BTreeMap::new(), path: Some(rest.to_string()) });
        }
        if !FAMILIES.contains(&name.as_str()) {
            return Err(NumericsError::Invalid(format!("unknown potential family `{name}`")));
        }
        let mut params = BTreeMap::new();
        for kv in rest.split(',').filter(|t| !t.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| NumericsError::Invalid(format!("expected key=value, got `{kv}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| NumericsError::Invalid(format!("bad number `{v}`")))?;
            params.insert(k.trim().to_string(), v);
        }
        Ok(PotentialSpec { family: name, params, path: None })
    }

    fn p(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    /// Canonical text form with every parameter explicit.
    pub fn canonical(&self) -> String {
        if let Some(p) = &self.path {
            return format!("csv:{p}");
        }
        let mut parts: Vec<String> = self.materialized().iter().map(|(k, v)| format!("{k}={v}")).collect();
        parts.sort();
        format!("{}:{}", self.family, parts.join(","))
    }

    /// Parameters with defaults filled in.
    pub fn materialized(&self) -> BTreeMap<String, f64> {
        let mut m = self.params.clone();
        let defaults: &[(&str, f64)] = match self.family.as_str() {
            "sech" | "sech2" | "gaussian" | "bump" => &[("a", 0.5), ("c", 0.0), ("l", 1.0)],
            "twobump" => &[("a", 0.5), ("c", 0.0), ("l", 1.0), ("d", 2.0)],
            _ => &[],
        };
        for (k, v) in defaults {
            m.entry(k.to_string()).or_insert(*v);
        }
        m
    }

    /// Pointwise value for analytic families.
    pub fn value(&self, x: f64) -> Result<f64> {
        let (a, c, l) = (self.p("a", 0.5), self.p("c", 0.0), self.p("l", 1.0));
        let t = (x - c) / l;
        Ok(match self.family.as_str() {
            "zero" => 0.0,
            "sech" => a / t.cosh(),
            "sech2" => a / t.cosh().powi(2),
            "gaussian" => a * (-t * t).exp(),
            "bump" => a / t.cosh().powi(4),
            "twobump" => {
                let d = self.p("d", 2.0) / l;
                a * ((-(t - d) * (t - d)).exp() + (-(t + d) * (t + d)).exp())
            }
            "fourier" => {
                let mut s = self.p("c0", 0.0);
                for (k, v) in &self.params {
                    if let Some(n) = k.strip_prefix('c').and_then(|n| n.parse::<u32>().ok()) {
                        if n > 0 {
                            s += v * (n as f64 * x).cos();
                        }
                    } else if let Some(n) = k.strip_prefix('s').and_then(|n| n.parse::<u32>().ok()) {
                        s += v * (n as f64 * x).sin();
                    }
                }
                s
            }
            other => return Err(NumericsError::Invalid(format!("`{other}` has no closed form"))),
        })
    }

    /// Half-width of an interval outside which the field is below `tol`.
    pub fn decay_radius(&self, tol: f64) -> Result<f64> {
        let m = self.materialized();
        let a = m.get("a").copied().unwrap_or(0.0).abs().max(tol);
        let l = m.get("l").copied().unwrap_or(1.0).abs();
        let c = m.get("c").copied().unwrap_or(0.0).abs();
        let r = match self.family.as_str() {
            "zero" => 8.0,
            "sech" => l * (2.0 * a / tol).ln(),
            "sech2" => 0.5 * l * (4.0 * a / tol).ln(),
            "bump" => 0.25 * l * (16.0 * a / tol).ln(),
            "gaussian" => l * (a / tol).ln().max(0.0).sqrt(),
            "twobump" => m["d"].abs() + l * (2.0 * a / tol).ln().max(0.0).sqrt(),
            other => return Err(NumericsError::Invalid(format!("`{other}` does not decay"))),
        };
        Ok(c + 1.05 * r.max(1.0))
    }

    /// Samples on a line interval chosen so the tail is below `tol`.
    pub fn on_line(&self, n: usize, tol: f64) -> Result<GridFunction> {
        if self.family == "csv" {
            return self.load_csv();
        }
        let r = self.decay_radius(tol)?;
        let g = GridFunction::from_real_fn(Geometry::Line { a: -r, b: r }, n, |x| self.value(x).unwrap_or(0.0))?;
        g.check_tail(tol)?;
        Ok(g)
    }

    /// Samples on `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64, n: usize) -> Result<GridFunction> {
        if self.family == "csv" {
            return self.load_csv()?.resample_to(Geometry::Line { a, b }, n);
        }
        GridFunction::from_real_fn(Geometry::Line { a, b }, n, |x| self.value(x).unwrap_or(0.0))
    }

    /// Samples on a periodic grid `[0, period)`.
    pub fn on_periodic(&self, period: f64, n: usize) -> Result<GridFunction> {
        if self.family == "csv" {
            return Err(NumericsError::Invalid("csv potentials are line data".into()));
        }
        GridFunction::from_real_fn(Geometry::Periodic { period }, n, |x| self.value(x).unwrap_or(0.0))
    }

    fn load_csv(&self) -> Result<GridFunction> {
        load_csv(Path::new(self.path.as_deref().unwrap_or_default()))
    }
}

impl GridFunction {
    fn resample_to(&self, g: Geometry, n: usize) -> Result<GridFunction> {
        let ip = self.interpolant();
        GridFunction::from_fn(g, n, |x| ip.eval(x))
    }
}

/// Reads `x,re[,im]` rows (header optional); nodes must be uniformly spaced.
pub fn load_csv(path: &Path) -> Result<GridFunction> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| NumericsError::Invalid(format!("{}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut vals = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| NumericsError::Invalid(e.to_string()))?;
        let nums: Vec<Option<f64>> = rec.iter().map(|f| f.parse().ok()).collect();
        match nums.as_slice() {
            [Some(x), Some(re)] => {
                xs.push(*x);
                vals.push(C64::new(*re, 0.0));
            }
            [Some(x), Some(re), Some(im), ..] => {
                xs.push(*x);
                vals.push(C64::new(*re, *im));
            }
            _ if xs.is_empty() => continue,
            _ => return Err(NumericsError::Invalid(format!("malformed csv row {:?}", rec))),
        }
    }
    if xs.len() < 16 {
        return Err(NumericsError::GridTooSmall(xs.len()));
    }
    let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    for (j, x) in xs.iter().enumerate() {
        if (x - (xs[0] + j as f64 * h)).abs() > 1e-9 * (1.0 + h.abs() * xs.len() as f64) {
            return Err(NumericsError::Invalid("csv nodes are not uniformly spaced".into()));
        }
    }
    GridFunction::new(Geometry::Line { a: xs[0], b: xs[xs.len() - 1] }, vals)
}
