//! Symbolic core: exact differential-polynomial algebra and generators for the
//! AKNS, KdV, Gardner, mKdV and good-variable hierarchies.

pub mod algebra;
pub mod error;
pub mod hierarchy;

pub use error::{AlgebraError, HierarchyError};
