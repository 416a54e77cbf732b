//! Poisson brackets of functionals and Hamiltonian vector fields.

use crate::algebra::{
    is_total_derivative, substitute_one, variational_derivative, DiffPolynomial, FunctionalDensity, GaussianRational,
    Param, ParamCoefficient, Var,
};
use crate::error::{AlgebraError, HierarchyError};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BracketStructure {
    /// Operator `∂`.
    Gardner,
    /// Operator `−∂³ + 2(u∂ + ∂u)`.
    Magri,
    /// `{F, G} = ∫ −i F_q G_r + i F_r G_q`.
    AknsSymplectic,
}

#[derive(Clone, Debug)]
pub struct BracketReport {
    pub structure: BracketStructure,
    pub bracket_density: DiffPolynomial,
    pub commutes: bool,
}

fn single_var(f: &FunctionalDensity, g: &FunctionalDensity) -> Result<Var, AlgebraError> {
    let vars: std::collections::BTreeSet<Var> =
        f.density.occurring_vars().union(&g.density.occurring_vars()).copied().collect();
    if vars.contains(&Var::S) {
        return Err(AlgebraError::UnsupportedAlphabet("brackets are undefined with s".into()));
    }
    match vars.len() {
        0 => Ok(Var::U),
        1 => Ok(*vars.iter().next().unwrap()),
        _ => Err(AlgebraError::UnsupportedAlphabet(format!("expected a single field, found {vars:?}"))),
    }
}

/// `(−∂³ + 2(u∂ + ∂u)) g = −g‴ + 4u g′ + 2u′ g` with `u` the given field.
pub fn magri_operator(g: &DiffPolynomial, field: Var) -> DiffPolynomial {
    let u = DiffPolynomial::var(field);
    let ux = DiffPolynomial::deriv_var(field, 1);
    let g1 = g.x_derivative();
    let mut out = -&g1.x_derivative().x_derivative();
    out.add_assign(&(&u * &g1).scale_int(4));
    out.add_assign(&(&ux * g).scale_int(2));
    out
}

pub fn poisson_bracket(
    f: &FunctionalDensity,
    g: &FunctionalDensity,
    structure: BracketStructure,
) -> Result<BracketReport, HierarchyError> {
    let density = match structure {
        BracketStructure::Gardner | BracketStructure::Magri => {
            let v = single_var(f, g)?;
            let df = variational_derivative(&f.density, v)?;
            let dg = variational_derivative(&g.density, v)?;
            let op = if structure == BracketStructure::Gardner { dg.x_derivative() } else { magri_operator(&dg, v) };
            &df * &op
        }
        BracketStructure::AknsSymplectic => {
            let fq = variational_derivative(&f.density, Var::Q)?;
            let fr = variational_derivative(&f.density, Var::R)?;
            let gq = variational_derivative(&g.density, Var::Q)?;
            let gr = variational_derivative(&g.density, Var::R)?;
            let i = GaussianRational::i();
            &(&fr * &gq).scale(&i) - &(&fq * &gr).scale(&i)
        }
    };
    let commutes = is_total_derivative(&density)?;
    Ok(BracketReport { structure, bracket_density: density, commutes })
}

/// Checks `{F∘M, G∘M}^{Gardner}_w ≡ ({F,G}^{Magri} + (2iz)²{F,G}^{Gardner})∘M` for the Miura
/// map `M(w) = w_x − 2izw + w²` at `z = iτ`, i.e. `M(w) = w_x + 2τw + w²` and `(2iz)² = 4τ²`.
/// Returns the total-derivative status of the defect for each power of τ.
pub fn magri_miura_identity(f: &FunctionalDensity, g: &FunctionalDensity) -> Result<Vec<(u16, bool)>, HierarchyError> {
    let w = DiffPolynomial::var(Var::W);
    let tau = DiffPolynomial::param(Param::Tau);
    let m = &(&DiffPolynomial::deriv_var(Var::W, 1) + &(&w * &tau).scale_int(2)) + &(&w * &w);
    let fm = substitute_one(&f.density, Var::U, &m);
    let gm = substitute_one(&g.density, Var::U, &m);
    let lhs = poisson_bracket(&FunctionalDensity::new(fm), &FunctionalDensity::new(gm), BracketStructure::Gardner)?;
    let df = variational_derivative(&f.density, Var::U)?;
    let dg = variational_derivative(&g.density, Var::U)?;
    let four_tau_sq = ParamCoefficient::monomial([2, 0], GaussianRational::from_int(4));
    let rhs_u = &(&df * &magri_operator(&dg, Var::U)) + &(&df * &dg.x_derivative()).scale_coeff(&four_tau_sq);
    let rhs = substitute_one(&rhs_u, Var::U, &m);
    let defect = &lhs.bracket_density - &rhs;
    let mut powers: std::collections::BTreeSet<u16> = std::collections::BTreeSet::new();
    for (_, c) in defect.terms() {
        for (e, _) in c.terms() {
            powers.insert(e[0]);
        }
    }
    powers.insert(0);
    powers.insert(2);
    let mut out = Vec::new();
    for p in powers {
        let part = defect.map_coeffs(|c| {
            let mut r = ParamCoefficient::zero();
            for (e, v) in c.terms() {
                if e[0] == p {
                    r.add_term([0, e[1]], v);
                }
            }
            r
        });
        out.push((p, is_total_derivative(&part)?));
    }
    Ok(out)
}
