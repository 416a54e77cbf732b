//! Variational calculus on differential polynomials: partial and variational
//! derivatives, the total-derivative test, formal antiderivatives and substitution.

use super::coeff::ParamCoefficient;
use super::monomial::{DiffMonomial, Var};
use super::poly::DiffPolynomial;
use super::rational::{rat, GaussianRational};
use crate::error::AlgebraError;
use std::collections::{BTreeMap, HashMap};

fn reject_s(p: &DiffPolynomial, what: &str) -> Result<(), AlgebraError> {
    if p.occurring_vars().contains(&Var::S) {
        return Err(AlgebraError::UnsupportedAlphabet(format!("{what} is undefined in the presence of s = (1+v)^-1")));
    }
    Ok(())
}

/// Partial derivative `∂p/∂(v^{(k)})`, treating each jet coordinate as independent.
pub fn partial_derivative(p: &DiffPolynomial, v: Var, k: u16) -> DiffPolynomial {
    let mut r = DiffPolynomial::zero_over(p.alphabet().iter().copied());
    for (m, c) in p.terms() {
        let e = m.power_of(v, k);
        if e == 0 {
            continue;
        }
        let rest = m.divide_factor(v, k).expect("factor present");
        r.add_term(rest, &c.scale(&GaussianRational::from_int(e as i64)));
    }
    r
}

/// Euler operator `Σᵢ (−∂)ⁱ ∂p/∂v^{(i)}`.
pub fn variational_derivative(p: &DiffPolynomial, v: Var) -> Result<DiffPolynomial, AlgebraError> {
    reject_s(p, "variational derivative")?;
    if v == Var::S {
        return Err(AlgebraError::UnsupportedAlphabet("cannot vary with respect to s".into()));
    }
    let top = match p.terms().filter_map(|(m, _)| m.max_order_of(v)).max() {
        Some(k) => k,
        None => return Ok(DiffPolynomial::zero_over(p.alphabet().iter().copied())),
    };
    // Horner form: P₀ − ∂(P₁ − ∂(P₂ − …)).
    let mut acc = partial_derivative(p, v, top);
    for k in (0..top).rev() {
        acc = &partial_derivative(p, v, k) - &acc.x_derivative();
    }
    Ok(acc)
}

/// True iff `p` is a total x-derivative: no constant term and zero Euler operator in every variable.
pub fn is_total_derivative(p: &DiffPolynomial) -> Result<bool, AlgebraError> {
    reject_s(p, "total-derivative test")?;
    if !p.constant_term().is_zero() {
        return Ok(false);
    }
    for v in p.occurring_vars() {
        if !variational_derivative(p, v)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Formal antiderivative `Q` with `∂Q = p`, by peeling the highest derivative.
pub fn formal_antiderivative(p: &DiffPolynomial) -> Result<DiffPolynomial, AlgebraError> {
    if !is_total_derivative(p)? {
        return Err(AlgebraError::NotATotalDerivative(format!("{} terms fail the Euler test", p.len())));
    }
    let mut rest = p.clone();
    let mut q = DiffPolynomial::zero_over(p.alphabet().iter().copied());
    let mut guard = 0usize;
    while !rest.is_zero() {
        guard += 1;
        if guard > 100_000 {
            return Err(AlgebraError::NotATotalDerivative("peeling did not terminate".into()));
        }
        // Largest (order, var) key over all factors.
        let (order, var) = rest
            .terms()
            .flat_map(|(m, _)| m.factors().iter().map(|f| (f.order, f.var)).collect::<Vec<_>>())
            .max()
            .expect("nonzero polynomial without factors would be a constant");
        if order == 0 {
            return Err(AlgebraError::NotATotalDerivative("underived remainder".into()));
        }
        let mut batch = DiffPolynomial::zero_over(p.alphabet().iter().copied());
        for (m, c) in rest.terms() {
            let e = m.power_of(var, order);
            if e == 0 {
                continue;
            }
            if e > 1 {
                return Err(AlgebraError::NotATotalDerivative(format!("{var}^({order}) occurs nonlinearly")));
            }
            let a = m.divide_factor(var, order).expect("present");
            let (b, j) = a.split_off(var, order - 1);
            let mut mm = b;
            mm.mul_factor(var, order - 1, j + 1);
            batch.add_term(mm, &c.scale_rational(&rat(1, j as i64 + 1)));
        }
        rest.sub_assign(&batch.x_derivative());
        q.add_assign(&batch);
    }
    Ok(q)
}

/// Variable substitution `v ↦ map[v]`, extended to derivatives by the chain rule.
/// Variables without an image are left unchanged.
pub fn substitute(p: &DiffPolynomial, map: &BTreeMap<Var, DiffPolynomial>) -> DiffPolynomial {
    let mut alphabet: Vec<Var> = p.alphabet().iter().filter(|v| !map.contains_key(v)).copied().collect();
    for img in map.values() {
        alphabet.extend(img.alphabet().iter().copied());
    }
    let mut derivs: HashMap<(Var, u16), DiffPolynomial> = HashMap::new();
    let mut powers: HashMap<(Var, u16, u16), DiffPolynomial> = HashMap::new();
    let mut out = DiffPolynomial::zero_over(alphabet);
    for (m, c) in p.terms() {
        let mut kept = DiffMonomial::one();
        let mut prod = DiffPolynomial::from_coeff(c.clone());
        for f in m.factors() {
            if !map.contains_key(&f.var) {
                kept.mul_factor(f.var, f.order, f.power);
                continue;
            }
            let key = (f.var, f.order, f.power);
            if !powers.contains_key(&key) {
                let d = derivative_image(&mut derivs, map, f.var, f.order);
                powers.insert(key, d.pow(f.power as u32));
            }
            prod = prod.mul_poly(&powers[&key]);
            if prod.is_zero() {
                break;
            }
        }
        out.add_assign(&prod.mul_term(&kept, &ParamCoefficient::from_int(1)));
    }
    out
}

fn derivative_image(
    cache: &mut HashMap<(Var, u16), DiffPolynomial>,
    map: &BTreeMap<Var, DiffPolynomial>,
    v: Var,
    k: u16,
) -> DiffPolynomial {
    if let Some(d) = cache.get(&(v, k)) {
        return d.clone();
    }
    let d = if k == 0 { map[&v].clone() } else { derivative_image(cache, map, v, k - 1).x_derivative() };
    cache.insert((v, k), d.clone());
    d
}

/// Convenience: substitute a single variable.
pub fn substitute_one(p: &DiffPolynomial, v: Var, image: &DiffPolynomial) -> DiffPolynomial {
    let mut map = BTreeMap::new();
    map.insert(v, image.clone());
    substitute(p, &map)
}

/// Applies a linear differential operator `Σ a_k ∂^k` (given as coefficient polynomials) to `g`.
pub fn apply_operator(ops: &[DiffPolynomial], g: &DiffPolynomial) -> DiffPolynomial {
    let mut out = DiffPolynomial::zero();
    let mut dg = g.clone();
    for (k, a) in ops.iter().enumerate() {
        if k > 0 {
            dg = dg.x_derivative();
        }
        if !a.is_zero() {
            out.add_assign(&a.mul_poly(&dg));
        }
    }
    out
}
