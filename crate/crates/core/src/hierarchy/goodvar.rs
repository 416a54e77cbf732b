//! Good-variable equations `v_t = ∂F_N` over the alphabet `{v, s = (1+v)⁻¹}`.

use super::gardner::minus_four_tau0_sq_pow;
use super::kdv::KdvTable;
use crate::algebra::{
    substitute_one, DiffMonomial, DiffPolynomial, GaussianRational, Param, ParamCoefficient, Var,
};
use crate::error::HierarchyError;

/// `u = −½ v_xx s + ¾ v_x² s² + τ₀² v² + 2τ₀² v`.
pub fn u_in_v() -> DiffPolynomial {
    let v = DiffPolynomial::var(Var::V);
    let s = DiffPolynomial::var(Var::S);
    let vx = DiffPolynomial::deriv_var(Var::V, 1);
    let vxx = DiffPolynomial::deriv_var(Var::V, 2);
    let t2 = ParamCoefficient::monomial([0, 2], GaussianRational::one());
    let mut u = (&vxx * &s).scale(&GaussianRational::from_ratio(-1, 2));
    u.add_assign(&(&(&vx * &vx) * &(&s * &s)).scale(&GaussianRational::from_ratio(3, 4)));
    u.add_assign(&(&v * &v).scale_coeff(&t2));
    u.add_assign(&v.scale_coeff(&t2).scale_int(2));
    u
}

/// `w = τ₀v − ½ v_x s`.
pub fn w_in_v() -> DiffPolynomial {
    let v = DiffPolynomial::var(Var::V);
    let s = DiffPolynomial::var(Var::S);
    let vx = DiffPolynomial::deriv_var(Var::V, 1);
    &(&v * &DiffPolynomial::param(Param::Tau0)) - &(&vx * &s).scale(&GaussianRational::from_ratio(1, 2))
}

/// Canonical form: rewrites `v·s = 1 − s` until no monomial holds both `s` and an underived `v`.
/// The resulting basis `{vᵃ} ∪ {sⁿ}` (times derivative monomials) is unique.
pub fn normalize_s(p: &DiffPolynomial) -> DiffPolynomial {
    let mut out = DiffPolynomial::zero_over(p.alphabet().iter().copied());
    let mut work: Vec<(DiffMonomial, ParamCoefficient)> = p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    while let Some((m, c)) = work.pop() {
        let n = m.power_of(Var::S, 0);
        let a = m.power_of(Var::V, 0);
        if n == 0 || a == 0 {
            out.add_term(m, &c);
            continue;
        }
        let (rest, _) = m.split_off(Var::S, 0);
        let (base, _) = rest.split_off(Var::V, 0);
        // B sⁿ vᵃ = B sⁿ⁻¹ vᵃ⁻¹ − B sⁿ vᵃ⁻¹
        let mut m1 = base.clone();
        m1.mul_factor(Var::S, 0, n - 1);
        m1.mul_factor(Var::V, 0, a - 1);
        let mut m2 = base;
        m2.mul_factor(Var::S, 0, n);
        m2.mul_factor(Var::V, 0, a - 1);
        work.push((m1, c.clone()));
        work.push((m2, c.neg()));
    }
    out
}

/// `F_N` with the constant term dropped, from `2(v+1) Σ_{n=−1}^{N−1} (−4τ₀²)^{N−1−n} G_n(u(v))`
/// where `G_{−1} = ½`.
pub fn good_variable_equation(n_max: usize, kdv: &KdvTable) -> Result<DiffPolynomial, HierarchyError> {
    if n_max > kdv.order + 1 {
        return Err(HierarchyError::inconsistency("good variable", "Lenard table too short"));
    }
    let u = u_in_v();
    let mut sum = DiffPolynomial::zero_over([Var::V, Var::S]);
    sum.add_assign(&DiffPolynomial::from_coeff(minus_four_tau0_sq_pow(n_max).scale(&GaussianRational::from_ratio(1, 2))));
    for n in 0..n_max {
        let g = substitute_one(&kdv.gradients[n], Var::U, &u);
        sum.add_assign(&g.scale_coeff(&minus_four_tau0_sq_pow(n_max - 1 - n)));
    }
    let one_plus_v = &DiffPolynomial::from_int(1) + &DiffPolynomial::var(Var::V);
    let f = normalize_s(&(&one_plus_v * &sum).scale_int(2));
    let f = f.filter_terms(|m, _| !m.is_one());
    check_good_variable_structure(n_max, &f)?;
    Ok(f)
}

/// Constraints on every monomial `τ₀^l sⁿ f` (f of homogeneity k with d derivatives):
/// l even, l + d = 2N, n ≤ 2N − 1, n + 1 ≤ k ≤ 2N + 1, at least n + 1 differentiated factors
/// when n ≥ 1, no constant, no `v·v^{(2N)}`, and linear part `(−1)^N v^{(2N)}`.
pub fn check_good_variable_structure(n_max: usize, f: &DiffPolynomial) -> Result<(), HierarchyError> {
    let nn = n_max as i64;
    let fail = |msg: String| Err(HierarchyError::structure("good variable structure", msg));
    let mut forbidden = DiffMonomial::var(Var::V, 0);
    forbidden.mul_factor(Var::V, 2 * n_max as u16, 1);
    for (m, c) in f.terms() {
        let n = m.s_power() as i64;
        let k = m.homogeneity() as i64;
        let d = m.weight() as i64;
        for (e, _) in c.terms() {
            let l = e[1] as i64;
            if e[0] != 0 || l % 2 != 0 || l + d != 2 * nn {
                return fail(format!("monomial {m} with tau0^{l}: l + d = {}", l + d));
            }
        }
        if n > (2 * nn - 1).max(0) || k > 2 * nn + 1 {
            return fail(format!("monomial {m}: n = {n}, k = {k}"));
        }
        if n >= 1 && (m.derivative_factor_count() as i64) < n + 1 {
            return fail(format!("monomial {m}: too few differentiated factors"));
        }
        if n >= 1 && k < n + 1 {
            return fail(format!("monomial {m}: homogeneity {k} below n + 1"));
        }
        if n == 0 && n_max > 0 && *m == forbidden {
            return fail(format!("forbidden term {m}"));
        }
        if n == 0 && k == 0 {
            return fail("constant term".into());
        }
        if n == 0 && k == 1 {
            let expected = DiffMonomial::var(Var::V, 2 * n_max as u16);
            let sign = if n_max % 2 == 0 { 1 } else { -1 };
            if *m != expected || c != &ParamCoefficient::from_int(sign) {
                return fail(format!("linear part contains {c} {m}"));
            }
        }
    }
    Ok(())
}

/// Derivative-pulled form: `F = Σ_j ∂^j P_j` where no factor in any `P_j` carries more
/// than `N` derivatives.
pub fn pulled_form(f: &DiffPolynomial, n_max: usize) -> Result<Vec<DiffPolynomial>, HierarchyError> {
    let bound = n_max as u16;
    let mut buckets: Vec<DiffPolynomial> = vec![f.clone()];
    let mut j = 0;
    while j < buckets.len() {
        let mut guard = 0;
        loop {
            guard += 1;
            if guard > 10_000 {
                return Err(HierarchyError::structure("pulled form", "reduction did not terminate"));
            }
            let offending = buckets[j].terms().find_map(|(m, c)| {
                let top = m.factors().iter().filter(|fa| fa.var != Var::S && fa.order > bound).max_by_key(|fa| fa.order)?;
                Some((m.clone(), c.clone(), *top))
            });
            let Some((m, c, top)) = offending else { break };
            if top.power > 1 {
                return Err(HierarchyError::structure("pulled form", format!("{m} has a repeated high-order factor")));
            }
            // A f^{(a)} = ∂(A f^{(a−1)}) − (∂A) f^{(a−1)}
            let a = m.divide_factor(top.var, top.order).expect("present");
            let a_poly = DiffPolynomial::from_term(a.clone(), c.clone());
            let lower = DiffPolynomial::deriv_var(top.var, top.order - 1);
            let pulled = &a_poly * &lower;
            let residual = &a_poly.x_derivative() * &lower;
            let mut here = buckets[j].clone();
            here.sub_assign(&DiffPolynomial::from_term(m.clone(), c.clone()));
            here.sub_assign(&residual);
            buckets[j] = here;
            if buckets.len() == j + 1 {
                buckets.push(DiffPolynomial::zero_over(f.alphabet().iter().copied()));
            }
            buckets[j + 1].add_assign(&pulled);
        }
        j += 1;
    }
    while buckets.len() > 1 && buckets.last().map(|b| b.is_zero()).unwrap_or(false) {
        buckets.pop();
    }
    Ok(buckets.into_iter().map(|b| normalize_s(&b)).collect())
}

/// Reassembles `Σ_j ∂^j P_j`.
pub fn assemble_pulled(parts: &[DiffPolynomial]) -> DiffPolynomial {
    let mut out = DiffPolynomial::zero_over([Var::V, Var::S]);
    for (j, p) in parts.iter().enumerate() {
        out.add_assign(&p.x_derivative_n(j));
    }
    normalize_s(&out)
}
