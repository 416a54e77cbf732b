//! Numerical scattering, Miura and good-variable maps, Fredholm determinants and
//! pseudospectral flows for the KdV, Gardner and good-variable hierarchies.

pub mod density;
pub mod det2;
pub mod error;
pub mod flows;
pub mod grid;
pub mod ode;
pub mod periodic;
pub mod potentials;
pub mod scattering;

pub use error::{NumericsError, Result};
pub use grid::{Geometry, GridFunction, Spectral, C64};
pub use potentials::PotentialSpec;
pub use scattering::SpectralPoint;
