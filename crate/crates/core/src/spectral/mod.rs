//! Periodic grids, spectral field types, transforms and pointwise operations.

mod field;
mod grid;
mod ops;
mod snapshot;
mod transform;

pub use field::{Field, ScalarField, SpectralVectorField, TensorField};
pub use grid::Grid;
pub use ops::{
    dealias, derivative, divergence, lp_norm, lp_norm_physical, pointwise_tensor, spectral_energy,
};
pub(crate) use ops::{products_to_spectral, self_tensor, synthesize};
pub use snapshot::{Snapshot, FORMAT_VERSION, MAGIC};
pub use transform::{to_physical, to_spectral, PhysicalField};
