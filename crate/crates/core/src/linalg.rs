//! Small dense helpers shared by assembly and the operators.

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;

use crate::C64;

pub fn zeros(n: usize) -> Vec<C64> {
    vec![C64::new(0.0, 0.0); n]
}

/// `Σ conj(a_i) b_i`
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `m * x` for a real matrix and complex vector.
pub fn rmatvec(m: &Mat<f64>, x: &[C64]) -> Vec<C64> {
    debug_assert_eq!(m.ncols(), x.len());
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| x[j] * m[(i, j)]).sum())
        .collect()
}

/// `m^T * x` for a real matrix and complex vector.
pub fn rmatvec_t(m: &Mat<f64>, x: &[C64]) -> Vec<C64> {
    debug_assert_eq!(m.nrows(), x.len());
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| x[i] * m[(i, j)]).sum())
        .collect()
}

pub fn cmatvec(m: &Mat<C64>, x: &[C64]) -> Vec<C64> {
    debug_assert_eq!(m.ncols(), x.len());
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum())
        .collect()
}

pub fn to_complex(m: &Mat<f64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| C64::new(m[(i, j)], 0.0))
}

pub fn identity(n: usize) -> Mat<f64> {
    Mat::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
}

/// Inverse through partial-pivoting LU; callers only use it on small,
/// well-conditioned face matrices.
pub fn inverse(m: &Mat<f64>) -> Mat<f64> {
    m.partial_piv_lu().inverse()
}

pub fn max_abs_diff(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let mut d: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            d = d.max((a[(i, j)] - b[(i, j)]).abs());
        }
    }
    d
}

/// Row-major dense complex block stored flat, used in hot loops.
#[derive(Debug, Clone)]
pub struct Block {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl Block {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Block {
            rows,
            cols,
            data: zeros(rows * cols),
        }
    }

    pub fn from_mat(m: &Mat<C64>) -> Self {
        let mut b = Block::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                b.data[i * m.ncols() + j] = m[(i, j)];
            }
        }
        b
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    /// `out = self * x`
    #[inline]
    pub fn apply(&self, x: &[C64], out: &mut [C64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.rows) {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// `out = self^H * x`
    #[inline]
    pub fn apply_adjoint(&self, x: &[C64], out: &mut [C64]) {
        for o in out.iter_mut().take(self.cols) {
            *o = C64::new(0.0, 0.0);
        }
        for (i, xi) in x.iter().enumerate().take(self.rows) {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * xi;
            }
        }
    }
}

/// Compressed-row complex sparse matrix with duplicate triplets summed.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<C64>,
}

impl SparseMatrix {
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; nrows + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |i| (r, self.cols[i], self.vals[i]))
        })
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.nrows) {
            *yr = (self.row_ptr[r]..self.row_ptr[r + 1]).map(|i| self.vals[i] * x[self.cols[i]]).sum();
        }
    }

    pub fn matvec_adjoint(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (r, xr) in x.iter().enumerate().take(self.nrows) {
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                y[self.cols[i]] += self.vals[i].conj() * xr;
            }
        }
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let mut m = Mat::<C64>::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }

    /// Sparse LU solve.
    pub fn solve(&self, b: &[C64]) -> crate::Result<Vec<C64>> {
        use faer::sparse::{SparseColMat, Triplet};
        let trip: Vec<Triplet<usize, usize, C64>> = self.triplets().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        let a = SparseColMat::<usize, C64>::try_new_from_triplets(self.nrows, self.ncols, &trip)
            .map_err(|_| crate::Error::Singular { what: "sparse" })?;
        let lu = a.sp_lu().map_err(|_| crate::Error::Singular { what: "sparse" })?;
        let rhs = faer::Col::<C64>::from_fn(b.len(), |i| b[i]);
        use faer::prelude::Solve;
        let x = lu.solve(&rhs);
        let out: Vec<C64> = (0..b.len()).map(|i| x[i]).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(crate::Error::Singular { what: "sparse" });
        }
        Ok(out)
    }
}
