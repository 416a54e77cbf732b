use hierarchylab_core::HierarchyError;
use thiserror::Error;

/// Errors raised by the numerical layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("grid too small: {0} samples (need at least 16)")]
    GridTooSmall(usize),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("potential does not decay: |f| = {value:.3e} at the {side} end exceeds {tol:.1e}")]
    NonDecayingPotential { side: &'static str, value: f64, tol: f64 },
    #[error("operation requires a truncated line, got a periodic grid")]
    PeriodicRejected,
    #[error("spectral point {0} is not in the upper half-plane")]
    LowerHalfPlane(String),
    #[error("1 + v is not positive (min {0:.3e})")]
    SingularS(f64),
    #[error("step control failed at x = {x}: step {h:.3e}")]
    StiffnessFailure { x: f64, h: f64 },
    #[error("z = {z} is (numerically) an eigenvalue: |W| = {wronskian:.3e}")]
    AtEigenvalue { z: String, wronskian: f64 },
    #[error("not in the Miura range at tau = {tau}: Jost function reaches {value:.3e} at x = {x}")]
    NotInMiuraRange { tau: f64, x: f64, value: f64 },
    #[error("{what} residual {value:.3e} exceeds {tol:.1e}")]
    ResidualTooLarge { what: String, value: f64, tol: f64 },
    #[error("branch of log T could not be tracked: {0}")]
    BranchAmbiguity(String),
    #[error("discretized kernel has an eigenvalue at -1")]
    EigenvalueAtMinusOne,
    #[error("grid refinement did not converge: {0}")]
    ConvergenceNotReached(String),
    #[error("periodic solve did not converge: {0}")]
    PeriodicSolve(String),
    #[error("blow-up detected at t = {t}: norm ratio {ratio:.3e} (last good t = {last_good})")]
    BlowupDetected { t: f64, ratio: f64, last_good: f64 },
    #[error("time step {dt} violates the stability budget: {detail}")]
    StabilityViolation { dt: f64, detail: String },
    #[error("good-variable guard: min(1+v) = {min:.3e} at t = {t}")]
    PositivityLost { t: f64, min: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
}

impl From<hierarchylab_core::AlgebraError> for NumericsError {
    fn from(e: hierarchylab_core::AlgebraError) -> Self {
        NumericsError::Hierarchy(e.into())
    }
}

pub type Result<T> = std::result::Result<T, NumericsError>;
