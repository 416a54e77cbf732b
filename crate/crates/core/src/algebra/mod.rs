//! Exact differential-polynomial algebra.
//!
//! Coefficients live in ℚ(i)[τ, τ₀]; monomials are products of derivatives of the
//! field variables. The symbol `s` stands for `(1+v)⁻¹` and obeys `∂s = −s²v′`.

pub mod calculus;
pub mod coeff;
pub mod density;
pub mod eval;
pub mod grading;
pub mod json;
pub mod monomial;
pub mod parse;
pub mod poly;
pub mod pretty;
pub mod rational;

pub use calculus::{
    apply_operator, formal_antiderivative, is_total_derivative, partial_derivative, substitute, substitute_one,
    variational_derivative,
};
pub use coeff::{Param, ParamCoefficient, ParamExp};
pub use density::{equal_mod_total_derivative, FunctionalDensity};
pub use eval::{evaluate, CompiledPoly};
pub use grading::{grading, Grading};
pub use monomial::{DiffMonomial, Factor, Var};
pub use parse::{nls_involution, parse_poly};
pub use poly::DiffPolynomial;
pub use pretty::{pretty, pretty_integral};
pub use rational::{rat, GaussianRational, Rational};
