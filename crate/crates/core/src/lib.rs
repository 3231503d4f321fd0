//! DG, HDG and CHDG discretizations of time-harmonic acoustics on triangle
//! meshes with piecewise-constant media.

pub mod analytic;
pub mod benchmark;
pub mod error;
pub mod fields;
pub mod fluxes;
pub mod hybrid;
pub mod linalg;
pub mod local;
pub mod mesh;
pub mod problem;
pub mod reference;
pub mod solvers;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
