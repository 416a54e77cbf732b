//! Functionals `∫ h dx` represented by their densities modulo total derivatives.

use super::calculus::{is_total_derivative, variational_derivative};
use super::monomial::Var;
use super::poly::DiffPolynomial;
use crate::error::AlgebraError;

/// A density regarded modulo total x-derivatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalDensity {
    pub density: DiffPolynomial,
}

impl FunctionalDensity {
    pub fn new(density: DiffPolynomial) -> Self {
        FunctionalDensity { density }
    }

    pub fn zero() -> Self {
        FunctionalDensity { density: DiffPolynomial::zero() }
    }

    /// Gradient `δ/δv ∫ h dx`.
    pub fn gradient(&self, v: Var) -> Result<DiffPolynomial, AlgebraError> {
        variational_derivative(&self.density, v)
    }

    /// Equality modulo total derivatives (see [`equal_mod_total_derivative`]).
    pub fn equivalent(&self, other: &FunctionalDensity) -> Result<bool, AlgebraError> {
        equal_mod_total_derivative(self, other)
    }

    /// True iff the density is itself a total derivative.
    pub fn is_trivial(&self) -> Result<bool, AlgebraError> {
        if !self.density.constant_term().is_zero() {
            return Err(AlgebraError::UnsupportedAlphabet("density has a constant term".into()));
        }
        is_total_derivative(&self.density)
    }
}

/// `∫p ≡ ∫q` iff `p − q` has vanishing Euler operator in every variable.
/// Densities carrying a constant term are rejected, since constants also lie in the Euler kernel.
pub fn equal_mod_total_derivative(p: &FunctionalDensity, q: &FunctionalDensity) -> Result<bool, AlgebraError> {
    for d in [&p.density, &q.density] {
        if !d.constant_term().is_zero() {
            return Err(AlgebraError::UnsupportedAlphabet("density has a constant term".into()));
        }
    }
    is_total_derivative(&(&p.density - &q.density))
}
