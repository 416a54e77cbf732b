//! Uniform tables of hierarchy data and their serialization.

use super::akns::{akns_table, reduce_table, AknsTable, Reduction};
use super::gardner::{gardner_from_tables, mkdv_from_akns};
use super::goodvar::good_variable_equation;
use super::kdv::lenard_sequence;
use crate::algebra::json::to_json_value;
use crate::algebra::{pretty, DiffPolynomial, FunctionalDensity, GaussianRational, Var};
use crate::error::HierarchyError;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Akns,
    ComplexKdv,
    Nls,
    RealMkdv,
    Wadati,
    Kdv,
    Gardner,
    Mkdv,
    GoodVariable,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Akns,
        Family::ComplexKdv,
        Family::Nls,
        Family::RealMkdv,
        Family::Wadati,
        Family::Kdv,
        Family::Gardner,
        Family::Mkdv,
        Family::GoodVariable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Akns => "akns",
            Family::ComplexKdv => "complex-kdv",
            Family::Nls => "nls",
            Family::RealMkdv => "real-mkdv",
            Family::Wadati => "wadati",
            Family::Kdv => "kdv",
            Family::Gardner => "gardner",
            Family::Mkdv => "mkdv",
            Family::GoodVariable => "goodvar",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        let s = s.to_ascii_lowercase();
        Family::ALL.iter().copied().find(|f| f.name() == s).or(match s.as_str() {
            "good-variable" | "goodvariable" => Some(Family::GoodVariable),
            _ => None,
        })
    }

    fn reduction(self) -> Option<Reduction> {
        match self {
            Family::ComplexKdv => Some(Reduction::ComplexKdv),
            Family::Nls => Some(Reduction::Nls),
            Family::RealMkdv => Some(Reduction::RealMkdv),
            Family::Wadati => Some(Reduction::Wadati),
            _ => None,
        }
    }
}

/// One row of a table.
#[derive(Clone, Debug, Default)]
pub struct Entry {
    pub n: usize,
    pub alpha: Option<DiffPolynomial>,
    pub beta: Option<DiffPolynomial>,
    pub gamma: Option<DiffPolynomial>,
    pub hamiltonian: Option<FunctionalDensity>,
    pub gradients: Vec<(Var, DiffPolynomial)>,
    /// One component per field (two for AKNS-type systems).
    pub vector_field: Vec<(Var, DiffPolynomial)>,
    pub flux: Option<DiffPolynomial>,
}

#[derive(Clone, Debug)]
pub struct HierarchyTable {
    pub family: Family,
    pub order: usize,
    pub entries: Vec<Entry>,
}

fn akns_entries(t: &AknsTable, n_max: usize, fields: &[Var]) -> Vec<Entry> {
    (0..=n_max + 1)
        .map(|n| {
            let mut e = Entry {
                n,
                alpha: Some(t.alpha[n].clone()),
                beta: Some(t.beta[n].clone()),
                gamma: Some(t.gamma[n].clone()),
                ..Default::default()
            };
            if n >= 1 && n <= n_max {
                let h = t.hamiltonians[n].clone();
                for v in fields {
                    if let Ok(g) = h.gradient(*v) {
                        e.gradients.push((*v, g));
                    }
                }
                e.hamiltonian = Some(h);
                e.vector_field = vec![(fields[0], t.alpha[n].clone())];
                if fields.len() > 1 {
                    e.vector_field.push((fields[1], t.beta[n].clone()));
                }
            }
            e
        })
        .collect()
}

/// Builds the table for `family` up to order `n_max`, running every internal cross-check.
pub fn build_table(family: Family, n_max: usize) -> Result<HierarchyTable, HierarchyError> {
    let entries = match family {
        Family::Akns => akns_entries(&akns_table(n_max.max(1))?, n_max.max(1), &[Var::Q, Var::R]),
        Family::ComplexKdv | Family::Nls | Family::RealMkdv | Family::Wadati => {
            let red = family.reduction().unwrap();
            let t = reduce_table(&akns_table(n_max.max(1))?, red);
            let fields: Vec<Var> = match red {
                Reduction::ComplexKdv | Reduction::RealMkdv => vec![Var::Q],
                Reduction::Nls => vec![Var::Q, Var::QBar],
                Reduction::Wadati => vec![Var::W],
            };
            akns_entries(&t, n_max.max(1), &fields)
        }
        Family::Kdv => {
            let t = lenard_sequence(n_max)?;
            (0..=n_max)
                .map(|n| Entry {
                    n,
                    hamiltonian: Some(t.hamiltonians[n].clone()),
                    gradients: vec![(Var::U, t.gradients[n].clone())],
                    vector_field: vec![(Var::U, t.gradients[n].x_derivative())],
                    ..Default::default()
                })
                .collect()
        }
        Family::Gardner => {
            let kdv = lenard_sequence(n_max)?;
            let akns = akns_table(2 * n_max + 3)?;
            let g = gardner_from_tables(n_max, &kdv, &akns)?;
            (0..=n_max)
                .map(|n| Entry {
                    n,
                    hamiltonian: Some(g.hamiltonians[n].clone()),
                    gradients: vec![(Var::W, g.gradients[n].clone())],
                    vector_field: vec![(Var::W, g.gradients[n].x_derivative())],
                    flux: Some(g.fluxes[n].clone()),
                    ..Default::default()
                })
                .collect()
        }
        Family::Mkdv => {
            let akns = akns_table(2 * n_max + 2)?;
            let m = mkdv_from_akns(n_max, &akns)?;
            (0..=n_max)
                .map(|n| Entry {
                    n,
                    hamiltonian: Some(m.hamiltonians[n].clone()),
                    gradients: vec![(Var::V, m.gradients[n].clone())],
                    vector_field: vec![(Var::V, m.gradients[n].x_derivative())],
                    ..Default::default()
                })
                .collect()
        }
        Family::GoodVariable => {
            let kdv = lenard_sequence(n_max.saturating_sub(1))?;
            let mut out = Vec::new();
            for n in 0..=n_max {
                let f = good_variable_equation(n, &kdv)?;
                out.push(Entry {
                    n,
                    vector_field: vec![(Var::V, f.x_derivative())],
                    gradients: vec![(Var::V, f)],
                    ..Default::default()
                });
            }
            out
        }
    };
    Ok(HierarchyTable { family, order: n_max, entries })
}

fn poly_json(p: &DiffPolynomial) -> Value {
    json!({ "json": to_json_value(p), "text": pretty(p) })
}

impl HierarchyTable {
    /// JSON document for `family/N.json`. For the good-variable family the `gradients`
    /// slot holds `F_N` (so that `v_t = ∂F_N`).
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                let mut m = serde_json::Map::new();
                m.insert("n".into(), json!(e.n));
                for (name, p) in [("alpha", &e.alpha), ("beta", &e.beta), ("gamma", &e.gamma)] {
                    if let Some(p) = p {
                        m.insert(name.into(), poly_json(p));
                    }
                }
                if let Some(h) = &e.hamiltonian {
                    m.insert("hamiltonian".into(), poly_json(&h.density));
                }
                if !e.gradients.is_empty() {
                    let g: serde_json::Map<String, Value> =
                        e.gradients.iter().map(|(v, p)| (v.name().to_string(), poly_json(p))).collect();
                    m.insert(if self.family == Family::GoodVariable { "F".into() } else { "gradients".into() }, Value::Object(g));
                }
                if !e.vector_field.is_empty() {
                    let g: serde_json::Map<String, Value> =
                        e.vector_field.iter().map(|(v, p)| (v.name().to_string(), poly_json(p))).collect();
                    m.insert("vector_field".into(), Value::Object(g));
                }
                if let Some(f) = &e.flux {
                    m.insert("flux".into(), poly_json(f));
                }
                Value::Object(m)
            })
            .collect();
        json!({
            "family": self.family.name(),
            "n": self.order,
            "convention": "main-text-half",
            "entries": entries,
        })
    }

    /// Plain-text listing, one identity per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("# {} hierarchy up to N = {}\n", self.family.name(), self.order);
        for e in &self.entries {
            let n = e.n;
            if let (Some(a), Some(b), Some(g)) = (&e.alpha, &e.beta, &e.gamma) {
                s += &format!("α{} = {}\nβ{} = {}\nγ{} = {}\n", sub(n), pretty(a), sub(n), pretty(b), sub(n), pretty(g));
            }
            if let Some(h) = &e.hamiltonian {
                s += &format!("H{} = ∫ {} dx\n", sub(n), pretty(&h.density));
            }
            if self.family == Family::GoodVariable {
                for (_, f) in &e.gradients {
                    s += &format!("F{} = {}\n", sub(n), pretty(f));
                }
            } else if e.alpha.is_none() {
                for (v, g) in &e.gradients {
                    s += &format!("δH{}/δ{} = {}\n", sub(n), v.symbol(), pretty(g));
                }
            }
            if let Some(f) = &e.flux {
                s += &format!("Fl{} = {}\n", sub(n), pretty(f));
            }
        }
        s
    }
}

fn sub(n: usize) -> String {
    const SUB: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    n.to_string().chars().map(|c| SUB[c.to_digit(10).unwrap() as usize]).collect()
}

/// Scales a tabulated entry given without the `½` prefactor onto the `½` convention.
pub fn halve(p: &DiffPolynomial) -> DiffPolynomial {
    p.scale(&GaussianRational::from_ratio(1, 2))
}
