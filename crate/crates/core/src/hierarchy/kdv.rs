//! KdV hierarchy from the Lenard recursion.

use crate::algebra::{
    formal_antiderivative, variational_derivative, DiffMonomial, DiffPolynomial, FunctionalDensity, GaussianRational,
    Rational, Var,
};
use crate::error::{AlgebraError, HierarchyError};
use num_bigint::BigInt;
use num_traits::One;

/// Gradients `G_n = δH_n/δu` and Hamiltonians `H_n` for `n = 0..=N`.
#[derive(Clone, Debug)]
pub struct KdvTable {
    pub order: usize,
    pub gradients: Vec<DiffPolynomial>,
    pub hamiltonians: Vec<FunctionalDensity>,
}

/// Applies the Lenard operator `−∂³ + 4u∂ + 2u_x` to `g`.
pub fn lenard_operator(g: &DiffPolynomial) -> DiffPolynomial {
    let u = DiffPolynomial::var(Var::U);
    let ux = DiffPolynomial::deriv_var(Var::U, 1);
    let g1 = g.x_derivative();
    let g3 = g1.x_derivative().x_derivative();
    let mut out = -&g3;
    out.add_assign(&(&u * &g1).scale_int(4));
    out.add_assign(&(&ux * g).scale_int(2));
    out
}

/// Runs the recursion from `G₀ = u`.
pub fn lenard_sequence(n_max: usize) -> Result<KdvTable, HierarchyError> {
    let mut gradients = vec![DiffPolynomial::var(Var::U)];
    for n in 0..n_max {
        let rhs = lenard_operator(&gradients[n]);
        let next = formal_antiderivative(&rhs).map_err(|e| match e {
            AlgebraError::NotATotalDerivative(d) => {
                HierarchyError::inconsistency("lenard antiderivative", format!("step {n}: {d}"))
            }
            other => other.into(),
        })?;
        if next.x_derivative() != rhs {
            return Err(HierarchyError::inconsistency("lenard antiderivative", format!("round trip fails at step {n}")));
        }
        gradients.push(next);
    }
    let mut hamiltonians = Vec::with_capacity(gradients.len());
    for g in &gradients {
        hamiltonians.push(hamiltonian_from_gradient(g, Var::U)?);
    }
    Ok(KdvTable { order: n_max, gradients, hamiltonians })
}

/// Homotopy reconstruction: a part of homogeneity `k−1` contributes `(1/k)·var·G_k`.
pub fn hamiltonian_from_gradient(g: &DiffPolynomial, var: Var) -> Result<FunctionalDensity, HierarchyError> {
    let v = DiffPolynomial::var(var);
    let mut h = DiffPolynomial::zero_over(g.alphabet().iter().copied().chain([var]));
    for (m, c) in g.terms() {
        let k = field_homogeneity(m, var) + 1;
        let part = DiffPolynomial::from_term(m.clone(), c.clone());
        let scale = Rational::new(BigInt::one(), BigInt::from(k));
        h.add_assign(&(&v * &part).scale_rational(&scale));
    }
    let back = variational_derivative(&h, var)?;
    if &back != g {
        return Err(AlgebraError::NotAGradient(format!("Euler operator of the reconstruction differs from the input in {} terms", (&back - g).len())).into());
    }
    Ok(FunctionalDensity::new(h))
}

/// Number of factors of `var` (with multiplicity) in `m`.
pub fn field_homogeneity(m: &DiffMonomial, var: Var) -> u32 {
    m.factors().iter().filter(|f| f.var == var).map(|f| f.power as u32).sum()
}

/// `C(n, k)` as an exact rational.
pub fn binomial(n: u64, k: u64) -> Rational {
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    Rational::from_integer(acc)
}

/// Leading-term data of the Lenard table, compared with the closed-form coefficients.
#[derive(Clone, Debug)]
pub struct KdvLeadingTerms {
    pub n: usize,
    /// Coefficient of `u^{(2n)}` in `G_n`; expected `(−1)ⁿ`.
    pub linear_gradient_coeff: GaussianRational,
    /// Coefficient of `u^{n+1}` in `G_n`; expected `½·C(2n+2, n+1)`.
    pub top_gradient_coeff: GaussianRational,
    /// Coefficient of `u^{n+2}` in the homotopy density of `H_n`.
    pub top_hamiltonian_coeff: GaussianRational,
    /// `C(2n+2, n+1)/(n+2)`: the closed form as stated without the `½` prefactor.
    pub closed_form_unhalved: Rational,
    /// `C(2n+2, n+1)/(2(n+2))`: the same closed form under the `½` convention.
    pub closed_form_halved: Rational,
}

pub fn leading_terms(t: &KdvTable) -> Vec<KdvLeadingTerms> {
    (0..=t.order)
        .map(|n| {
            let g = &t.gradients[n];
            let h = &t.hamiltonians[n].density;
            let lin = g.coeff_of(&DiffMonomial::var(Var::U, 2 * n as u16)).as_constant().unwrap_or_default();
            let top = g.coeff_of(&DiffMonomial::var_pow(Var::U, 0, n as u16 + 1)).as_constant().unwrap_or_default();
            let htop = h.coeff_of(&DiffMonomial::var_pow(Var::U, 0, n as u16 + 2)).as_constant().unwrap_or_default();
            let c = binomial(2 * n as u64 + 2, n as u64 + 1);
            KdvLeadingTerms {
                n,
                linear_gradient_coeff: lin,
                top_gradient_coeff: top,
                top_hamiltonian_coeff: htop,
                closed_form_unhalved: &c / Rational::from_integer(BigInt::from(n + 2)),
                closed_form_halved: &c / Rational::from_integer(BigInt::from(2 * (n + 2))),
            }
        })
        .collect()
}
