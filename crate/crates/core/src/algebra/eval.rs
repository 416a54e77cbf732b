//! Numeric evaluation of differential polynomials on jets.

use super::{DiffPolynomial, Var};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// A polynomial flattened for repeated evaluation: each term is a coefficient and a list of
/// `(slot, power)` pairs, where slots index the distinct `(var, order)` pairs in [`Self::slots`].
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    slots: Vec<(Var, u16)>,
    terms: Vec<(Complex64, Vec<(usize, u16)>)>,
}

impl CompiledPoly {
    /// Substitutes numeric values for `tau` and `tau0` and indexes the jet slots.
    pub fn new(p: &DiffPolynomial, tau: Complex64, tau0: Complex64) -> Self {
        let mut index: BTreeMap<(Var, u16), usize> = BTreeMap::new();
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let (re, im) = c.eval((tau.re, tau.im), (tau0.re, tau0.im));
            let mut fs = Vec::new();
            for f in m.factors() {
                let n = index.len();
                let k = *index.entry((f.var, f.order)).or_insert(n);
                fs.push((k, f.power));
            }
            terms.push((Complex64::new(re, im), fs));
        }
        let mut slots = vec![(Var::U, 0); index.len()];
        for (key, k) in index {
            slots[k] = key;
        }
        CompiledPoly { slots, terms }
    }

    /// The `(var, order)` pairs whose values must be supplied, in slot order.
    pub fn slots(&self) -> &[(Var, u16)] {
        &self.slots
    }

    pub fn eval(&self, values: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, fs) in &self.terms {
            let mut t = *c;
            for &(k, pw) in fs {
                t *= values[k].powu(pw as u32);
            }
            acc += t;
        }
        acc
    }

    /// Real-valued evaluation; the imaginary parts of the coefficients are dropped.
    pub fn eval_real(&self, values: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, fs) in &self.terms {
            let mut t = c.re;
            for &(k, pw) in fs {
                t *= values[k].powi(pw as i32);
            }
            acc += t;
        }
        acc
    }
}

/// One-shot evaluation with jet values supplied by `jet(var, order)`.
pub fn evaluate(p: &DiffPolynomial, jet: impl Fn(Var, u16) -> Complex64, tau: Complex64, tau0: Complex64) -> Complex64 {
    let c = CompiledPoly::new(p, tau, tau0);
    let values: Vec<Complex64> = c.slots().iter().map(|&(v, k)| jet(v, k)).collect();
    c.eval(&values)
}
