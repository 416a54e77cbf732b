//! Gardner Hamiltonians via the Miura map, their KdV limit, and the mKdV reduction.

use super::akns::{akns_table, reduce_table, AknsTable, Reduction};
use super::kdv::{binomial, field_homogeneity, hamiltonian_from_gradient, lenard_sequence, KdvTable};
use crate::algebra::{
    equal_mod_total_derivative, formal_antiderivative, substitute, substitute_one, variational_derivative,
    DiffMonomial, DiffPolynomial, FunctionalDensity, GaussianRational, Param, ParamCoefficient, Rational, Var,
};
use crate::error::HierarchyError;
use num_bigint::BigInt;
use std::collections::BTreeMap;

/// `M(w) = w_x + 2τ₀w + w²`.
pub fn miura_polynomial() -> DiffPolynomial {
    let w = DiffPolynomial::var(Var::W);
    let mut m = DiffPolynomial::deriv_var(Var::W, 1);
    m.add_assign(&(&w * &DiffPolynomial::param(Param::Tau0)).scale_int(2));
    m.add_assign(&(&w * &w));
    m
}

/// `(−4τ₀²)^k` as a coefficient.
pub fn minus_four_tau0_sq_pow(k: usize) -> ParamCoefficient {
    let c = GaussianRational::from_int(-4).pow(k as u32);
    ParamCoefficient::monomial([0, 2 * k as u16], c)
}

#[derive(Clone, Debug)]
pub struct GardnerTable {
    pub order: usize,
    /// `H_n^{Gardner}(w, τ₀)` for `n = 0..=N` (½ convention).
    pub hamiltonians: Vec<FunctionalDensity>,
    /// `δH_n/δw`.
    pub gradients: Vec<DiffPolynomial>,
    /// Energy fluxes `Fl_n` with `∂Fl_n = 2w ∂(δH_n/δw)`.
    pub fluxes: Vec<DiffPolynomial>,
}

/// `H_n^{KdV}(M(w))` for each stored KdV Hamiltonian.
pub fn kdv_pullbacks(kdv: &KdvTable) -> Vec<DiffPolynomial> {
    kdv.hamiltonians.iter().map(|h| substitute_one(&h.density, Var::U, &miura_polynomial())).collect()
}

/// Closed formula `H_N = (−4τ₀²)^N ½∫w² + Σ_{n<N} (−4τ₀²)^{N−n−1} H_n^{KdV}(M(w))`.
pub fn gardner_from_pullbacks(pullbacks: &[DiffPolynomial], n_max: usize) -> Vec<FunctionalDensity> {
    let w = DiffPolynomial::var(Var::W);
    let half_w2 = (&w * &w).scale(&GaussianRational::from_ratio(1, 2));
    (0..=n_max)
        .map(|n| {
            let mut h = half_w2.scale_coeff(&minus_four_tau0_sq_pow(n));
            for (k, pb) in pullbacks.iter().enumerate().take(n) {
                h.add_assign(&pb.scale_coeff(&minus_four_tau0_sq_pow(n - k - 1)));
            }
            FunctionalDensity::new(h)
        })
        .collect()
}

/// Builds the Gardner table up to `N` and verifies the Miura recursion, the Wadati
/// cross-route and the structure of every Hamiltonian.
pub fn gardner_hamiltonians(n_max: usize) -> Result<GardnerTable, HierarchyError> {
    let kdv = lenard_sequence(n_max)?;
    let akns = akns_table(2 * n_max + 3)?;
    gardner_from_tables(n_max, &kdv, &akns)
}

pub fn gardner_from_tables(n_max: usize, kdv: &KdvTable, akns: &AknsTable) -> Result<GardnerTable, HierarchyError> {
    let pullbacks = kdv_pullbacks(kdv);
    let hamiltonians = gardner_from_pullbacks(&pullbacks, n_max + 1);
    let four_tau0_sq = ParamCoefficient::monomial([0, 2], GaussianRational::from_int(4));
    for n in 0..=n_max {
        // H_n^{KdV}(M(w)) = H_{n+1} + 4τ₀² H_n
        let rhs = &hamiltonians[n + 1].density + &hamiltonians[n].density.scale_coeff(&four_tau0_sq);
        if !equal_mod_total_derivative(&FunctionalDensity::new(pullbacks[n].clone()), &FunctionalDensity::new(rhs))? {
            return Err(HierarchyError::inconsistency("gardner miura recursion", format!("fails at N={n}")));
        }
    }
    let wadati = reduce_table(akns, Reduction::Wadati);
    for n in 0..=n_max {
        // ½ H_{2n+3}^{Wadati} = H_n^{KdV}(M(w))
        let half = wadati.hamiltonians[2 * n + 3].density.scale(&GaussianRational::from_ratio(1, 2));
        if !equal_mod_total_derivative(&FunctionalDensity::new(half), &FunctionalDensity::new(pullbacks[n].clone()))? {
            return Err(HierarchyError::inconsistency("gardner wadati route", format!("fails at N={n}")));
        }
    }
    let mut hs = Vec::with_capacity(n_max + 1);
    for h in hamiltonians.into_iter().take(n_max + 1) {
        hs.push(hamiltonian_from_gradient(&variational_derivative(&h.density, Var::W)?, Var::W)?);
    }
    for (n, h) in hs.iter().enumerate() {
        check_gardner_structure(n, &h.density)?;
    }
    let mut gradients = Vec::new();
    let mut fluxes = Vec::new();
    for h in &hs {
        let g = variational_derivative(&h.density, Var::W)?;
        fluxes.push(flux_of(&g)?);
        gradients.push(g);
    }
    Ok(GardnerTable { order: n_max, hamiltonians: hs, gradients, fluxes })
}

/// Fl with `∂Fl = 2w·∂g`.
pub fn flux_of(gradient: &DiffPolynomial) -> Result<DiffPolynomial, HierarchyError> {
    let w = DiffPolynomial::var(Var::W);
    let rhs = (&w * &gradient.x_derivative()).scale_int(2);
    let fl = formal_antiderivative(&rhs)
        .map_err(|e| HierarchyError::inconsistency("gardner flux", e.to_string()))?;
    if fl.x_derivative() != rhs {
        return Err(HierarchyError::inconsistency("gardner flux", "round trip fails"));
    }
    Ok(fl)
}

/// Every monomial `τ₀^m f` with `f` of homogeneity `j` and weight `d` satisfies
/// `j + d + m = 2N + 2` and `m ≤ j − 2`.
pub fn check_gardner_structure(n: usize, h: &DiffPolynomial) -> Result<(), HierarchyError> {
    for (mono, c) in h.terms() {
        let j = field_homogeneity(mono, Var::W) as i64;
        let d = mono.weight() as i64;
        for (e, _) in c.terms() {
            let m = e[1] as i64;
            if e[0] != 0 || j + d + m != 2 * n as i64 + 2 || m > j - 2 {
                return Err(HierarchyError::structure(
                    "gardner hamiltonian grading",
                    format!("H_{n}: monomial {mono} with tau0^{m} has degree {}", j + d + m),
                ));
            }
        }
    }
    Ok(())
}

/// `lim 4τ₀² H_N^{Gardner}(u/(2τ₀), τ₀)`: keeps monomials with `w`-homogeneity equal to
/// the `τ₀`-power plus two and rescales.
pub fn kdv_limit_of(h: &DiffPolynomial) -> DiffPolynomial {
    let mut out = DiffPolynomial::zero_over([Var::U]);
    for (mono, c) in h.terms() {
        let j = field_homogeneity(mono, Var::W);
        for (e, g) in c.terms() {
            let m = e[1] as u32;
            if j != m + 2 {
                continue;
            }
            // c τ₀^m (2τ₀)^{−j} 4τ₀² = c 2^{−m}
            let scale = Rational::new(BigInt::from(1), BigInt::from(2).pow(m));
            out.add_term(mono.rename(|v| if v == Var::W { Var::U } else { v }), &ParamCoefficient::constant(g.scale(&scale)));
        }
    }
    out
}

/// KdV Hamiltonian recovered from the Gardner Hamiltonian, checked against Lenard.
pub fn kdv_from_gardner_limit(n: usize, gardner: &GardnerTable, kdv: &KdvTable) -> Result<FunctionalDensity, HierarchyError> {
    let lim = FunctionalDensity::new(kdv_limit_of(&gardner.hamiltonians[n].density));
    if !equal_mod_total_derivative(&lim, &kdv.hamiltonians[n])? {
        return Err(HierarchyError::inconsistency("kdv limit of gardner", format!("differs from Lenard at N={n}")));
    }
    Ok(lim)
}

#[derive(Clone, Debug)]
pub struct MkdvTable {
    pub order: usize,
    /// `H_n^{mKdV}(v) = ½ H_{2n+1}^{AKNS}(v, v)`.
    pub hamiltonians: Vec<FunctionalDensity>,
    pub gradients: Vec<DiffPolynomial>,
    /// Coefficient of `v^{2n+2}` in `H_n^{mKdV}`.
    pub top_coefficients: Vec<GaussianRational>,
}

/// The substitution `q = r = v`.
pub fn mkdv_substitution() -> BTreeMap<Var, DiffPolynomial> {
    let mut m = BTreeMap::new();
    m.insert(Var::Q, DiffPolynomial::var(Var::V));
    m.insert(Var::R, DiffPolynomial::var(Var::V));
    m
}

pub fn mkdv_hamiltonians(n_max: usize) -> Result<MkdvTable, HierarchyError> {
    let akns = akns_table(2 * n_max + 2)?;
    mkdv_from_akns(n_max, &akns)
}

pub fn mkdv_from_akns(n_max: usize, akns: &AknsTable) -> Result<MkdvTable, HierarchyError> {
    let sub = mkdv_substitution();
    let mut hamiltonians = Vec::new();
    let mut gradients = Vec::new();
    let mut tops = Vec::new();
    for n in 1..akns.hamiltonians.len().min(2 * n_max + 3) {
        if n % 2 == 0 {
            let h = FunctionalDensity::new(substitute(&akns.hamiltonians[n].density, &sub));
            if !h.is_trivial()? {
                return Err(HierarchyError::inconsistency("mkdv even hamiltonians", format!("H_{n}(v,v) is not a total derivative")));
            }
        }
    }
    for n in 0..=n_max {
        let full = substitute(&akns.hamiltonians[2 * n + 1].density, &sub);
        let h = full.scale(&GaussianRational::from_ratio(1, 2));
        let top = h.coeff_of(&DiffMonomial::var_pow(Var::V, 0, 2 * n as u16 + 2)).as_constant().unwrap_or_default();
        // ½ · C(2n+2, n+1)/(2(2n+1))
        let expected = binomial(2 * n as u64 + 2, n as u64 + 1) / Rational::from_integer(BigInt::from(4 * (2 * n + 1)));
        if top != GaussianRational::real(expected) {
            return Err(HierarchyError::inconsistency("mkdv leading coefficient", format!("n={n}: got {top}")));
        }
        gradients.push(variational_derivative(&h, Var::V)?);
        hamiltonians.push(FunctionalDensity::new(h));
        tops.push(top);
    }
    Ok(MkdvTable { order: n_max, hamiltonians, gradients, top_coefficients: tops })
}
