//! Canonical JSON form of differential polynomials.
//!
//! Field order is fixed so that serialization round-trips byte for byte.

use super::coeff::{Param, ParamCoefficient};
use super::monomial::{DiffMonomial, Factor, Var};
use super::poly::DiffPolynomial;
use super::rational::{rational_from_str, rational_to_string, GaussianRational};
use crate::error::AlgebraError;
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CoeffJson {
    pub exp: [u16; 2],
    pub re: String,
    pub im: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct TermJson {
    pub coeff: Vec<CoeffJson>,
    pub monomial: Vec<(String, u16, u16)>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PolyJson {
    pub alphabet: Vec<String>,
    pub params: Vec<String>,
    pub terms: Vec<TermJson>,
}

impl From<&DiffPolynomial> for PolyJson {
    fn from(p: &DiffPolynomial) -> Self {
        PolyJson {
            alphabet: p.alphabet().iter().map(|v| v.name().to_string()).collect(),
            params: Param::ALL.iter().map(|p| p.name().to_string()).collect(),
            terms: p
                .terms()
                .map(|(m, c)| TermJson {
                    coeff: c
                        .terms()
                        .map(|(e, g)| CoeffJson { exp: *e, re: rational_to_string(&g.re), im: rational_to_string(&g.im) })
                        .collect(),
                    monomial: m.factors().iter().map(|f| (f.var.name().to_string(), f.order, f.power)).collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&PolyJson> for DiffPolynomial {
    type Error = AlgebraError;
    fn try_from(j: &PolyJson) -> Result<Self, AlgebraError> {
        let bad = |s: String| AlgebraError::Serialization(s);
        let expected: Vec<String> = Param::ALL.iter().map(|p| p.name().to_string()).collect();
        if j.params != expected {
            return Err(bad(format!("unexpected parameter list {:?}", j.params)));
        }
        let mut alphabet = Vec::new();
        for a in &j.alphabet {
            alphabet.push(Var::from_name(a).ok_or_else(|| bad(format!("unknown variable {a}")))?);
        }
        let mut p = DiffPolynomial::zero_over(alphabet);
        for t in &j.terms {
            let mut fs = Vec::new();
            for (name, order, power) in &t.monomial {
                let var = Var::from_name(name).ok_or_else(|| bad(format!("unknown variable {name}")))?;
                if !p.alphabet().contains(&var) {
                    return Err(bad(format!("variable {name} outside declared alphabet")));
                }
                fs.push(Factor { var, order: *order, power: *power });
            }
            let mut c = ParamCoefficient::zero();
            for e in &t.coeff {
                let re = rational_from_str(&e.re).ok_or_else(|| bad(format!("bad rational {}", e.re)))?;
                let im = rational_from_str(&e.im).ok_or_else(|| bad(format!("bad rational {}", e.im)))?;
                c.add_term(e.exp, &GaussianRational::new(re, im));
            }
            p.add_term(DiffMonomial::from_factors(fs), &c);
        }
        Ok(p)
    }
}

/// Serializes to compact canonical JSON.
pub fn to_json(p: &DiffPolynomial) -> String {
    serde_json::to_string(&PolyJson::from(p)).expect("polynomial JSON is always serializable")
}

pub fn to_json_value(p: &DiffPolynomial) -> serde_json::Value {
    serde_json::to_value(PolyJson::from(p)).expect("polynomial JSON is always serializable")
}

pub fn from_json(s: &str) -> Result<DiffPolynomial, AlgebraError> {
    let j: PolyJson = serde_json::from_str(s).map_err(|e| AlgebraError::Serialization(e.to_string()))?;
    DiffPolynomial::try_from(&j)
}

pub fn from_json_value(v: &serde_json::Value) -> Result<DiffPolynomial, AlgebraError> {
    let j: PolyJson = serde_json::from_value(v.clone()).map_err(|e| AlgebraError::Serialization(e.to_string()))?;
    DiffPolynomial::try_from(&j)
}
