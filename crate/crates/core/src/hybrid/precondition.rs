use faer::Mat;
use rayon::prelude::*;

use super::LinearOperator;
use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::Problem;
use crate::C64;

/// Which block structure the operator's vectors carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockLayout {
    /// One block per element-face incidence (CHDG).
    Transmission,
    /// One block per mesh face (HDG).
    Trace,
}

/// `Ã = Lᵀ A L⁻ᵀ` for a coefficient-form operator `A`, with `M = L Lᵀ` the
/// block-diagonal face mass matrix.
///
/// In Galerkin form this is `L⁻¹ (M A) L⁻ᵀ`. Vectors map as `g̃ = Lᵀ g` and
/// right-hand sides as `b̃ = Lᵀ b`, so `‖g̃‖₂` is the `L²` norm of the field.
pub struct Preconditioned<O> {
    pub inner: O,
    nf: usize,
    lower: Vec<Mat<f64>>,
    lower_inv: Vec<Mat<f64>>,
}

pub fn precondition<O: LinearOperator>(op: O, problem: &Problem, layout: BlockLayout) -> Result<Preconditioned<O>> {
    let mesh = &problem.mesh;
    let faces: Vec<usize> = match layout {
        BlockLayout::Transmission => mesh.element_faces.iter().flatten().copied().collect(),
        BlockLayout::Trace => (0..mesh.num_faces()).collect(),
    };
    let masses: Vec<&Mat<f64>> = faces.iter().map(|&f| &problem.face_ops[f].mass).collect();
    Preconditioned::new(op, &masses)
}

impl<O: LinearOperator> Preconditioned<O> {
    pub fn new(inner: O, masses: &[&Mat<f64>]) -> Result<Self> {
        let nf = masses.first().map_or(0, |m| m.nrows());
        if nf * masses.len() != inner.dim() {
            return Err(Error::InvalidInput(format!(
                "{} mass blocks of size {nf} do not match dimension {}",
                masses.len(),
                inner.dim()
            )));
        }
        let lower = masses
            .par_iter()
            .map(|m| {
                let llt = m.llt(faer::Side::Lower).map_err(|_| Error::Singular {
                    what: "face mass Cholesky",
                })?;
                Ok(llt.L().to_owned())
            })
            .collect::<Result<Vec<_>>>()?;
        let lower_inv = lower.iter().map(linalg::inverse).collect();
        Ok(Preconditioned {
            inner,
            nf,
            lower,
            lower_inv,
        })
    }

    fn blockwise(&self, mats: &[Mat<f64>], transpose: bool, x: &[C64]) -> Vec<C64> {
        let nf = self.nf;
        let mut y = linalg::zeros(x.len());
        y.par_chunks_mut(nf)
            .zip(x.par_chunks(nf))
            .zip(mats)
            .for_each(|((yb, xb), m)| {
                let v = if transpose { linalg::rmatvec_t(m, xb) } else { linalg::rmatvec(m, xb) };
                yb.copy_from_slice(&v);
            });
        y
    }

    /// `g̃ = Lᵀ g`
    pub fn to_preconditioned(&self, g: &[C64]) -> Vec<C64> {
        self.blockwise(&self.lower, true, g)
    }

    /// `g = L⁻ᵀ g̃`
    pub fn from_preconditioned(&self, g: &[C64]) -> Vec<C64> {
        self.blockwise(&self.lower_inv, true, g)
    }
}

impl<O: LinearOperator> LinearOperator for Preconditioned<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let t = self.from_preconditioned(x);
        let at = self.inner.apply_vec(&t);
        y.copy_from_slice(&self.to_preconditioned(&at));
    }

    /// `(Lᵀ A L⁻ᵀ)^H = L⁻¹ A^H L`
    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        let t = self.blockwise(&self.lower, false, x);
        let at = self.inner.apply_adjoint_vec(&t);
        y.copy_from_slice(&self.blockwise(&self.lower_inv, false, &at));
    }
}
