//! Pseudo-spectral tools for the mild formulation of the incompressible
//! Navier–Stokes equations on the periodic torus `[0, 2π)^n`, `n ∈ {2, 3}`.

pub mod error;
pub mod littlewood_paley;
pub mod monitor;
pub mod paraproduct;
pub mod semigroup;
pub mod solver;
pub mod spectral;
mod stats;
pub mod verify;

pub use error::{Error, Result};
