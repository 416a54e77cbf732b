//! AKNS iterates `α_n, β_n, γ_n` and Hamiltonians, plus the classical reductions.

use crate::algebra::{
    equal_mod_total_derivative, substitute, variational_derivative, DiffPolynomial, FunctionalDensity,
    GaussianRational, Param, Var,
};
use crate::error::HierarchyError;
use std::collections::BTreeMap;

/// Iterates for `n = 0..=N+1` and Hamiltonians `H_n = (1/2n)∫γ_{n+1}` for `n = 1..=N`.
#[derive(Clone, Debug)]
pub struct AknsTable {
    pub order: usize,
    pub alpha: Vec<DiffPolynomial>,
    pub beta: Vec<DiffPolynomial>,
    pub gamma: Vec<DiffPolynomial>,
    /// `hamiltonians[n]` is `H_n`; index 0 holds the zero functional.
    pub hamiltonians: Vec<FunctionalDensity>,
}

fn i_unit() -> GaussianRational {
    GaussianRational::i()
}

/// Iterates only, without the Hamiltonian cross-checks; `n = 0..=m`.
pub fn akns_iterates(m: usize) -> (Vec<DiffPolynomial>, Vec<DiffPolynomial>, Vec<DiffPolynomial>) {
    let q = DiffPolynomial::var(Var::Q).with_alphabet([Var::R]);
    let r = DiffPolynomial::var(Var::R).with_alphabet([Var::Q]);
    let zero = DiffPolynomial::zero_over([Var::Q, Var::R]);
    let mut alpha = vec![zero.clone()];
    let mut beta = vec![zero.clone()];
    let mut gamma = vec![DiffPolynomial::from_int(1).with_alphabet([Var::Q, Var::R])];
    let i = i_unit();
    let mi = -&i;
    for n in 0..m {
        let a = &alpha[n].x_derivative().scale(&i) - &(&q * &gamma[n]).scale(&i);
        let b = &beta[n].x_derivative().scale(&mi) + &(&r * &gamma[n]).scale(&i);
        alpha.push(a);
        beta.push(b);
        let k = n + 1;
        let mut g = zero.clone();
        for j in 1..k {
            g.add_assign(&(&alpha[j] * &beta[k - j]).scale_int(4));
            g.sub_assign(&(&gamma[j] * &gamma[k - j]));
        }
        gamma.push(g.scale(&GaussianRational::from_ratio(1, 2)));
    }
    (alpha, beta, gamma)
}

/// Builds the table up to order `N` and verifies
/// `γ_n′ = 2(qβ_n + rα_n)`, `δH_n/δq = −iβ_n` and `δH_n/δr = iα_n`.
pub fn akns_table(n_max: usize) -> Result<AknsTable, HierarchyError> {
    if n_max < 1 {
        return Err(HierarchyError::inconsistency("akns_table", "order must be at least 1"));
    }
    let (alpha, beta, gamma) = akns_iterates(n_max + 1);
    let q = DiffPolynomial::var(Var::Q);
    let r = DiffPolynomial::var(Var::R);
    for n in 0..=n_max + 1 {
        let lhs = gamma[n].x_derivative();
        let rhs = (&(&q * &beta[n]) + &(&r * &alpha[n])).scale_int(2);
        if lhs != rhs {
            return Err(HierarchyError::inconsistency(
                "akns gamma derivative",
                format!("gamma_{n}' != 2(q beta_{n} + r alpha_{n})"),
            ));
        }
    }
    let mut hamiltonians = vec![FunctionalDensity::new(DiffPolynomial::zero_over([Var::Q, Var::R]))];
    let i = i_unit();
    for n in 1..=n_max {
        let h = gamma[n + 1].scale(&GaussianRational::from_ratio(1, 2 * n as i64));
        let dq = variational_derivative(&h, Var::Q)?;
        let dr = variational_derivative(&h, Var::R)?;
        if dq != beta[n].scale(&-&i) {
            return Err(HierarchyError::inconsistency("akns gradient q", format!("dH_{n}/dq != -i beta_{n}")));
        }
        if dr != alpha[n].scale(&i) {
            return Err(HierarchyError::inconsistency("akns gradient r", format!("dH_{n}/dr != i alpha_{n}")));
        }
        hamiltonians.push(FunctionalDensity::new(h));
    }
    Ok(AknsTable { order: n_max, alpha, beta, gamma, hamiltonians })
}

/// Reductions of the AKNS hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    /// `r = 1`.
    ComplexKdv,
    /// `r = q̄`.
    Nls,
    /// `r = q`.
    RealMkdv,
    /// `q = w`, `r = w + 2τ₀`.
    Wadati,
}

impl Reduction {
    pub fn substitution(self) -> BTreeMap<Var, DiffPolynomial> {
        let mut m = BTreeMap::new();
        match self {
            Reduction::ComplexKdv => {
                m.insert(Var::R, DiffPolynomial::from_int(1));
            }
            Reduction::Nls => {
                m.insert(Var::R, DiffPolynomial::var(Var::QBar));
            }
            Reduction::RealMkdv => {
                m.insert(Var::R, DiffPolynomial::var(Var::Q));
            }
            Reduction::Wadati => {
                let w = DiffPolynomial::var(Var::W);
                m.insert(Var::Q, w.clone());
                m.insert(Var::R, &w + &DiffPolynomial::param(Param::Tau0).scale_int(2));
            }
        }
        m
    }

    pub fn apply(self, p: &DiffPolynomial) -> DiffPolynomial {
        substitute(p, &self.substitution())
    }

    pub fn name(self) -> &'static str {
        match self {
            Reduction::ComplexKdv => "complex-kdv",
            Reduction::Nls => "nls",
            Reduction::RealMkdv => "real-mkdv",
            Reduction::Wadati => "wadati",
        }
    }
}

/// The table with every entry reduced.
pub fn reduce_table(t: &AknsTable, red: Reduction) -> AknsTable {
    let map = |v: &Vec<DiffPolynomial>| v.iter().map(|p| red.apply(p)).collect::<Vec<_>>();
    AknsTable {
        order: t.order,
        alpha: map(&t.alpha),
        beta: map(&t.beta),
        gamma: map(&t.gamma),
        hamiltonians: t.hamiltonians.iter().map(|h| FunctionalDensity::new(red.apply(&h.density))).collect(),
    }
}

/// Reality of NLS Hamiltonians: invariance under `q ↔ q̄` with coefficient conjugation, mod ∂.
pub fn nls_reality(h: &FunctionalDensity) -> Result<bool, HierarchyError> {
    let c = FunctionalDensity::new(h.density.conjugate_with(crate::algebra::nls_involution));
    Ok(equal_mod_total_derivative(h, &c)?)
}

/// Complex-KdV reduction with `q` renamed `u`, odd iterates only: `(β_1, β_3, β_5, …)`.
pub fn complex_kdv_odd_betas(t: &AknsTable) -> Vec<DiffPolynomial> {
    let red = reduce_table(t, Reduction::ComplexKdv);
    let mut m = BTreeMap::new();
    m.insert(Var::Q, DiffPolynomial::var(Var::U));
    red.beta.iter().skip(1).step_by(2).map(|b| substitute(b, &m)).collect()
}

/// `β‴ − 4uβ′ − 2u′β`.
pub fn complex_kdv_operator(b: &DiffPolynomial) -> DiffPolynomial {
    -&crate::hierarchy::kdv::lenard_operator(b)
}

/// Residuals of `β_{2n−1}‴ − 4uβ_{2n−1}′ − 2u′β_{2n−1} = −β_{2n+1}′` for `n ≥ 1`.
pub fn complex_kdv_beta_residuals(t: &AknsTable) -> Vec<(usize, DiffPolynomial)> {
    let b = complex_kdv_odd_betas(t);
    (1..b.len()).map(|n| (n, &complex_kdv_operator(&b[n - 1]) + &b[n].x_derivative())).collect()
}

/// Residuals of the same identity with the derivative on `β_{2n+1}` dropped.
pub fn complex_kdv_beta_residuals_underived(t: &AknsTable) -> Vec<(usize, DiffPolynomial)> {
    let b = complex_kdv_odd_betas(t);
    (1..b.len()).map(|n| (n, &complex_kdv_operator(&b[n - 1]) + &b[n])).collect()
}
