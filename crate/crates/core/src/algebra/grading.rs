//! Gradings of differential monomials.

use super::coeff::ParamExp;
use super::monomial::DiffMonomial;
use super::poly::DiffPolynomial;
use super::rational::{rat, Rational};
use serde::Serialize;

/// Homogeneity `H` (factor count), weight `M` (derivative count) and derived degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Grading {
    pub homogeneity: i64,
    pub weight: i64,
    /// `H + M/2`.
    #[serde(serialize_with = "ser_rational")]
    pub degree_kdv: Rational,
    /// `H + M`.
    pub degree_gardner: i64,
    /// Power of `s = (1+v)⁻¹`, recorded separately.
    pub s_power: i64,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&super::rational::rational_to_string(r))
}

impl Grading {
    pub fn of(m: &DiffMonomial) -> Grading {
        let h = m.homogeneity() as i64;
        let w = m.weight() as i64;
        Grading {
            homogeneity: h,
            weight: w,
            degree_kdv: rat(2 * h + w, 2),
            degree_gardner: h + w,
            s_power: m.s_power() as i64,
        }
    }

    /// Degree `l + k − n + d` for generalized monomials `τ^l s^n f` with `f` of
    /// homogeneity `k` and `d` derivatives.
    pub fn generalized_degree(m: &DiffMonomial, tau_power: u16) -> i64 {
        m.homogeneity() as i64 - m.s_power() as i64 + m.weight() as i64 + tau_power as i64
    }
}

/// Per-term grades, with the parameter exponents of each coefficient term.
pub fn grading(p: &DiffPolynomial) -> Vec<(DiffMonomial, Vec<ParamExp>, Grading)> {
    p.terms()
        .map(|(m, c)| (m.clone(), c.terms().map(|(e, _)| *e).collect(), Grading::of(m)))
        .collect()
}

/// The common KdV degree of all monomials, if they share one.
pub fn uniform_degree_kdv(p: &DiffPolynomial) -> Option<Rational> {
    let mut it = p.terms().map(|(m, _)| Grading::of(m).degree_kdv);
    let first = it.next()?;
    it.all(|d| d == first).then_some(first)
}
