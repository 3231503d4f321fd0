//! Global systems: the DG oracle, the HDG trace system and the CHDG
//! transmission system, plus face-mass preconditioning and spectra.
//!
//! Transmission vectors hold one block of `p+1` coefficients per
//! element-face incidence, at offset `(3K + j)(p+1)` for local face `j` of
//! element `K`. Trace vectors hold one block per mesh face. All blocks use
//! the face's canonical parametrization.

mod chdg;
mod dg;
mod exchange;
mod hdg;
mod operator;
mod precondition;
mod spectral;

pub use chdg::{chdg_operator, ChdgSystem, PiS};
pub use dg::dg_oracle;
pub use exchange::{exchange, Exchange};
pub use hdg::{hdg_system, HdgSystem};
pub use operator::{write_triplets, DenseOperator, LinearOperator, SparseOperator};
pub use precondition::{precondition, BlockLayout, Preconditioned};
pub use spectral::{spectral_radius, SpectralEstimate, SpectralMode, DENSE_LIMIT};

use crate::problem::Problem;

/// Offset of block `(k, j)` in a transmission vector.
pub fn transmission_offset(problem: &Problem, k: usize, j: usize) -> usize {
    (3 * k + j) * problem.nf()
}

/// Offset of face `f` in a trace vector.
pub fn trace_offset(problem: &Problem, f: usize) -> usize {
    f * problem.nf()
}
