//! Closed-form reference solutions and the boundary data derived from them.

pub mod bessel;
mod cavity;
mod data;
mod plane_wave;

pub use cavity::{cavity_reference, CavityParams, CavityReference};
pub use data::{boundary_data, ReferenceField, ZeroField};
pub use plane_wave::{plane_wave_reference, PlaneWaveParams, PlaneWaveReference};
