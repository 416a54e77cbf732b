//! Differential polynomials and their arithmetic.

use super::coeff::{Param, ParamCoefficient};
use super::monomial::{DiffMonomial, Var};
use super::rational::{GaussianRational, Rational};
use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

/// A polynomial in field variables and their x-derivatives with coefficients in ℚ(i)[τ, τ₀].
///
/// Equality compares terms only; the alphabet records which variables the polynomial is
/// understood to depend on.
#[derive(Clone, Debug, Default)]
pub struct DiffPolynomial {
    terms: BTreeMap<DiffMonomial, ParamCoefficient>,
    alphabet: BTreeSet<Var>,
}

impl PartialEq for DiffPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for DiffPolynomial {}

impl std::hash::Hash for DiffPolynomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl DiffPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The zero polynomial over a declared alphabet.
    pub fn zero_over(alphabet: impl IntoIterator<Item = Var>) -> Self {
        DiffPolynomial { terms: BTreeMap::new(), alphabet: alphabet.into_iter().collect() }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_term(DiffMonomial::one(), ParamCoefficient::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(GaussianRational::from_int(n))
    }

    pub fn from_coeff(c: ParamCoefficient) -> Self {
        Self::from_term(DiffMonomial::one(), c)
    }

    /// The parameter `p` as a polynomial.
    pub fn param(p: Param) -> Self {
        Self::from_coeff(ParamCoefficient::param_power(p, 1))
    }

    /// The variable `v` itself.
    pub fn var(v: Var) -> Self {
        Self::deriv_var(v, 0)
    }

    /// The k-th derivative `v^{(k)}`.
    pub fn deriv_var(v: Var, k: u16) -> Self {
        Self::from_term(DiffMonomial::var(v, k), ParamCoefficient::from_int(1))
    }

    pub fn from_term(m: DiffMonomial, c: ParamCoefficient) -> Self {
        let mut p = DiffPolynomial::zero();
        p.alphabet.extend(m.vars());
        if m.contains_var(Var::S) {
            p.alphabet.insert(Var::V);
        }
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DiffMonomial, &ParamCoefficient)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn alphabet(&self) -> &BTreeSet<Var> {
        &self.alphabet
    }

    /// Extends the declared alphabet.
    pub fn with_alphabet(mut self, vars: impl IntoIterator<Item = Var>) -> Self {
        self.alphabet.extend(vars);
        self
    }

    /// Variables that actually occur in some term.
    pub fn occurring_vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars().collect::<Vec<_>>()).collect()
    }

    pub fn coeff_of(&self, m: &DiffMonomial) -> ParamCoefficient {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// The coefficient of the empty monomial.
    pub fn constant_term(&self) -> ParamCoefficient {
        self.coeff_of(&DiffMonomial::one())
    }

    pub fn add_term(&mut self, m: DiffMonomial, c: &ParamCoefficient) {
        if c.is_zero() {
            return;
        }
        self.alphabet.extend(m.vars());
        if m.contains_var(Var::S) {
            self.alphabet.insert(Var::V);
        }
        let mut remove = false;
        match self.terms.get_mut(&m) {
            Some(v) => {
                v.add_assign(c);
                remove = v.is_zero();
            }
            None => {
                self.terms.insert(m.clone(), c.clone());
            }
        }
        if remove {
            self.terms.remove(&m);
        }
    }

    pub fn add_assign(&mut self, o: &DiffPolynomial) {
        self.alphabet.extend(o.alphabet.iter().copied());
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn sub_assign(&mut self, o: &DiffPolynomial) {
        self.alphabet.extend(o.alphabet.iter().copied());
        for (m, c) in &o.terms {
            self.add_term(m.clone(), &c.neg());
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> DiffPolynomial {
        if c.is_zero() {
            return DiffPolynomial::zero_over(self.alphabet.iter().copied());
        }
        DiffPolynomial {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.scale(c))).collect(),
            alphabet: self.alphabet.clone(),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> DiffPolynomial {
        self.scale(&GaussianRational::real(r.clone()))
    }

    pub fn scale_int(&self, n: i64) -> DiffPolynomial {
        self.scale(&GaussianRational::from_int(n))
    }

    pub fn scale_coeff(&self, c: &ParamCoefficient) -> DiffPolynomial {
        let mut r = DiffPolynomial::zero_over(self.alphabet.iter().copied());
        for (m, v) in &self.terms {
            r.add_term(m.clone(), &v.mul(c));
        }
        r
    }

    /// Multiplies by a single monomial with a coefficient.
    pub fn mul_term(&self, m: &DiffMonomial, c: &ParamCoefficient) -> DiffPolynomial {
        let mut r = DiffPolynomial::zero_over(self.alphabet.iter().copied());
        for (m2, c2) in &self.terms {
            r.add_term(m.mul(m2), &c.mul(c2));
        }
        r
    }

    pub fn mul_poly(&self, o: &DiffPolynomial) -> DiffPolynomial {
        let mut r = DiffPolynomial::zero_over(self.alphabet.union(&o.alphabet).copied());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), &c1.mul(c2));
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> DiffPolynomial {
        let mut acc = DiffPolynomial::from_int(1).with_alphabet(self.alphabet.iter().copied());
        for _ in 0..k {
            acc = acc.mul_poly(self);
        }
        acc
    }

    /// Total x-derivative. Uses `∂s = −s²v′` for `s = (1+v)⁻¹`.
    pub fn x_derivative(&self) -> DiffPolynomial {
        let mut r = DiffPolynomial::zero_over(self.alphabet.iter().copied());
        for (m, c) in &self.terms {
            for f in m.factors() {
                let rest = m.divide_factor(f.var, f.order).expect("factor present");
                let k = GaussianRational::from_int(f.power as i64);
                if f.var == Var::S {
                    debug_assert_eq!(f.order, 0, "s only occurs underived");
                    let mut mm = rest;
                    mm.mul_factor(Var::S, 0, 2);
                    mm.mul_factor(Var::V, 1, 1);
                    r.add_term(mm, &c.scale(&(-k)));
                } else {
                    let mut mm = rest;
                    mm.mul_factor(f.var, f.order + 1, 1);
                    r.add_term(mm, &c.scale(&k));
                }
            }
        }
        r
    }

    /// The k-th total x-derivative.
    pub fn x_derivative_n(&self, k: usize) -> DiffPolynomial {
        let mut p = self.clone();
        for _ in 0..k {
            p = p.x_derivative();
        }
        p
    }

    /// Complex conjugation of coefficients combined with a variable involution.
    pub fn conjugate_with(&self, involution: impl Fn(Var) -> Var) -> DiffPolynomial {
        let mut r = DiffPolynomial::zero_over(self.alphabet.iter().map(|v| involution(*v)));
        for (m, c) in &self.terms {
            r.add_term(m.rename(&involution), &c.conj());
        }
        r
    }

    /// Keeps the terms satisfying a predicate.
    pub fn filter_terms(&self, keep: impl Fn(&DiffMonomial, &ParamCoefficient) -> bool) -> DiffPolynomial {
        DiffPolynomial {
            terms: self.terms.iter().filter(|(m, c)| keep(m, c)).map(|(m, c)| (m.clone(), c.clone())).collect(),
            alphabet: self.alphabet.clone(),
        }
    }

    /// Maps every coefficient (dropping those that become zero).
    pub fn map_coeffs(&self, f: impl Fn(&ParamCoefficient) -> ParamCoefficient) -> DiffPolynomial {
        let mut r = DiffPolynomial::zero_over(self.alphabet.iter().copied());
        for (m, c) in &self.terms {
            r.add_term(m.clone(), &f(c));
        }
        r
    }

    /// Highest derivative order of any variable, or `None` for a constant.
    pub fn max_order(&self) -> Option<u16> {
        self.terms.keys().flat_map(|m| m.factors().iter().map(|f| f.order)).max()
    }

    /// Largest homogeneity over all terms.
    pub fn max_homogeneity(&self) -> u32 {
        self.terms.keys().map(|m| m.homogeneity()).max().unwrap_or(0)
    }
}

impl Add for &DiffPolynomial {
    type Output = DiffPolynomial;
    fn add(self, o: &DiffPolynomial) -> DiffPolynomial {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }
}

impl Sub for &DiffPolynomial {
    type Output = DiffPolynomial;
    fn sub(self, o: &DiffPolynomial) -> DiffPolynomial {
        let mut r = self.clone();
        r.sub_assign(o);
        r
    }
}

impl Mul for &DiffPolynomial {
    type Output = DiffPolynomial;
    fn mul(self, o: &DiffPolynomial) -> DiffPolynomial {
        self.mul_poly(o)
    }
}

impl Neg for &DiffPolynomial {
    type Output = DiffPolynomial;
    fn neg(self) -> DiffPolynomial {
        self.scale_int(-1)
    }
}

impl Add for DiffPolynomial {
    type Output = DiffPolynomial;
    fn add(mut self, o: DiffPolynomial) -> DiffPolynomial {
        self.add_assign(&o);
        self
    }
}

impl Sub for DiffPolynomial {
    type Output = DiffPolynomial;
    fn sub(mut self, o: DiffPolynomial) -> DiffPolynomial {
        self.sub_assign(&o);
        self
    }
}

impl Mul for DiffPolynomial {
    type Output = DiffPolynomial;
    fn mul(self, o: DiffPolynomial) -> DiffPolynomial {
        self.mul_poly(&o)
    }
}

impl Neg for DiffPolynomial {
    type Output = DiffPolynomial;
    fn neg(self) -> DiffPolynomial {
        self.scale_int(-1)
    }
}
