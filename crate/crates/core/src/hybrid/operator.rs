use std::io::Write;

use faer::Mat;

use crate::linalg::{self, SparseMatrix};
use crate::C64;

/// A square complex operator with an adjoint.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[C64], y: &mut [C64]);

    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]);

    /// Column-by-column materialization; meant for small dimensions.
    fn to_dense(&self) -> Mat<C64> {
        let n = self.dim();
        let mut m = Mat::<C64>::zeros(n, n);
        let mut e = linalg::zeros(n);
        let mut col = linalg::zeros(n);
        for j in 0..n {
            e[j] = C64::new(1.0, 0.0);
            self.apply(&e, &mut col);
            for i in 0..n {
                m[(i, j)] = col[i];
            }
            e[j] = C64::new(0.0, 0.0);
        }
        m
    }

    fn apply_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = linalg::zeros(self.dim());
        self.apply(x, &mut y);
        y
    }

    fn apply_adjoint_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = linalg::zeros(self.dim());
        self.apply_adjoint(x, &mut y);
        y
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        (**self).apply(x, y)
    }

    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        (**self).apply_adjoint(x, y)
    }
}

#[derive(Debug, Clone)]
pub struct DenseOperator(pub Mat<C64>);

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.copy_from_slice(&linalg::cmatvec(&self.0, x));
    }

    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        let m = &self.0;
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = (0..m.nrows()).map(|i| m[(i, j)].conj() * x[i]).sum();
        }
    }

    fn to_dense(&self) -> Mat<C64> {
        self.0.clone()
    }
}

#[derive(Debug, Clone)]
pub struct SparseOperator(pub SparseMatrix);

impl LinearOperator for SparseOperator {
    fn dim(&self) -> usize {
        self.0.nrows
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.0.matvec(x, y)
    }

    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        self.0.matvec_adjoint(x, y)
    }

    fn to_dense(&self) -> Mat<C64> {
        self.0.to_dense()
    }
}

/// Writes nonzero entries as `row col re im` lines.
pub fn write_triplets(m: &Mat<C64>, out: &mut impl Write) -> std::io::Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != C64::new(0.0, 0.0) {
                writeln!(out, "{i} {j} {:.16e} {:.16e}", v.re, v.im)?;
            }
        }
    }
    Ok(())
}
