//! Coefficients: Gaussian-rational polynomials in the formal parameters `τ` and `τ₀`.

use super::rational::{GaussianRational, Rational};
use std::collections::BTreeMap;
use std::fmt;

/// The formal parameters, in serialization order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    Tau,
    Tau0,
}

impl Param {
    pub const ALL: [Param; 2] = [Param::Tau, Param::Tau0];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Param::Tau => "tau",
            Param::Tau0 => "tau0",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Param::Tau => "τ",
            Param::Tau0 => "τ₀",
        }
    }

    pub fn from_name(s: &str) -> Option<Param> {
        match s {
            "tau" => Some(Param::Tau),
            "tau0" => Some(Param::Tau0),
            _ => None,
        }
    }
}

/// Exponent vector `[l, m]` of `τ^l τ₀^m`.
pub type ParamExp = [u16; 2];

/// A polynomial in `τ, τ₀` with coefficients in ℚ(i). Zero entries are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ParamCoefficient {
    terms: BTreeMap<ParamExp, GaussianRational>,
}

impl ParamCoefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::monomial([0, 0], c)
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(GaussianRational::from_int(n))
    }

    pub fn monomial(exp: ParamExp, c: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        ParamCoefficient { terms }
    }

    /// The coefficient `p^k` for a single parameter.
    pub fn param_power(p: Param, k: u16) -> Self {
        let mut exp = [0, 0];
        exp[p.index()] = k;
        Self::monomial(exp, GaussianRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ParamExp, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Returns the constant value if the coefficient has no parameter dependence.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => self.terms.get(&[0, 0]).cloned(),
            _ => None,
        }
    }

    pub fn get(&self, exp: &ParamExp) -> GaussianRational {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, exp: ParamExp, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        let mut remove = false;
        match self.terms.get_mut(&exp) {
            Some(v) => {
                *v += c;
                remove = v.is_zero();
            }
            None => {
                self.terms.insert(exp, c.clone());
            }
        }
        if remove {
            self.terms.remove(&exp);
        }
    }

    pub fn add_assign(&mut self, o: &ParamCoefficient) {
        for (e, c) in &o.terms {
            self.add_term(*e, c);
        }
    }

    pub fn add(&self, o: &ParamCoefficient) -> ParamCoefficient {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn neg(&self) -> ParamCoefficient {
        ParamCoefficient { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    pub fn mul(&self, o: &ParamCoefficient) -> ParamCoefficient {
        let mut r = ParamCoefficient::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                r.add_term([e1[0] + e2[0], e1[1] + e2[1]], &(c1 * c2));
            }
        }
        r
    }

    pub fn scale(&self, c: &GaussianRational) -> ParamCoefficient {
        if c.is_zero() {
            return ParamCoefficient::zero();
        }
        ParamCoefficient { terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    pub fn scale_rational(&self, r: &Rational) -> ParamCoefficient {
        self.scale(&GaussianRational::real(r.clone()))
    }

    pub fn conj(&self) -> ParamCoefficient {
        ParamCoefficient { terms: self.terms.iter().map(|(e, c)| (*e, c.conj())).collect() }
    }

    /// Substitutes numeric values for the parameters.
    pub fn eval(&self, tau: (f64, f64), tau0: (f64, f64)) -> (f64, f64) {
        let mut acc = (0.0, 0.0);
        for (e, c) in &self.terms {
            let (cr, ci) = c.to_f64();
            let mut v = (cr, ci);
            for _ in 0..e[0] {
                v = cmul(v, tau);
            }
            for _ in 0..e[1] {
                v = cmul(v, tau0);
            }
            acc.0 += v.0;
            acc.1 += v.1;
        }
        acc
    }

    /// Replaces `τ₀` by `τ` (the two coincide whenever a single spectral parameter is in play).
    pub fn merge_tau0_into_tau(&self) -> ParamCoefficient {
        let mut r = ParamCoefficient::zero();
        for (e, c) in &self.terms {
            r.add_term([e[0] + e[1], 0], c);
        }
        r
    }

    /// Total parameter degree of every stored term (useful for homogeneity checks).
    pub fn degrees(&self) -> Vec<u16> {
        self.terms.keys().map(|e| e[0] + e[1]).collect()
    }
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

impl fmt::Display for ParamCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for p in Param::ALL {
                let k = e[p.index()];
                if k == 1 {
                    write!(f, "·{}", p.symbol())?;
                } else if k > 1 {
                    write!(f, "·{}^{}", p.symbol(), k)?;
                }
            }
        }
        Ok(())
    }
}
