use thiserror::Error;

/// Errors raised by the symbolic layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("unsupported alphabet: {0}")]
    UnsupportedAlphabet(String),
    #[error("not a total derivative: {0}")]
    NotATotalDerivative(String),
    #[error("not a variational gradient: {0}")]
    NotAGradient(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("serialization error: {0}")]
    Serialization(String),
}

/// Errors raised while generating hierarchies.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HierarchyError {
    #[error("recursion inconsistency in {check}: {detail}")]
    RecursionInconsistency { check: String, detail: String },
    #[error("structure violation in {check}: {detail}")]
    StructureViolation { check: String, detail: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl HierarchyError {
    pub fn inconsistency(check: impl Into<String>, detail: impl Into<String>) -> Self {
        HierarchyError::RecursionInconsistency { check: check.into(), detail: detail.into() }
    }

    pub fn structure(check: impl Into<String>, detail: impl Into<String>) -> Self {
        HierarchyError::StructureViolation { check: check.into(), detail: detail.into() }
    }

    /// Name of the identity that failed, if any.
    pub fn check_name(&self) -> Option<&str> {
        match self {
            HierarchyError::RecursionInconsistency { check, .. }
            | HierarchyError::StructureViolation { check, .. } => Some(check),
            HierarchyError::Algebra(_) => None,
        }
    }
}
