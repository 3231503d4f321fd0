//! Hierarchical Lobatto-type bases: vertex, edge and bubble functions on the
//! reference triangle, and the matching 1D basis on the reference edge [0, 1].
//!
//! Edge functions on the triangle restrict to the corresponding 1D edge
//! functions, so traces of vertex/edge modes are exactly representable.

/// Legendre polynomials `P_0..=P_n` and their derivatives at `x`.
pub fn legendre_table(n: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; n + 1];
    let mut d = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x;
        d[1] = 1.0;
    }
    for k in 2..=n {
        let kf = k as f64;
        p[k] = ((2.0 * kf - 1.0) * x * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf;
        // P'_k = P'_{k-2} + (2k - 1) P_{k-1}
        d[k] = d[k - 2] + (2.0 * kf - 1.0) * p[k - 1];
    }
    (p, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Vertex(usize),
    Edge { a: usize, b: usize, k: usize },
    Bubble { i: usize, j: usize },
}

#[derive(Debug, Clone)]
pub struct VolumeBasis {
    degree: usize,
    modes: Vec<Mode>,
}

const BARY_GRAD: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

impl VolumeBasis {
    pub fn new(degree: usize) -> Self {
        let mut modes: Vec<Mode> = (0..3).map(Mode::Vertex).collect();
        for e in 0..3 {
            for k in 0..degree.saturating_sub(1) {
                modes.push(Mode::Edge { a: e, b: (e + 1) % 3, k });
            }
        }
        if degree >= 3 {
            for total in 0..=degree - 3 {
                for i in 0..=total {
                    modes.push(Mode::Bubble { i, j: total - i });
                }
            }
        }
        VolumeBasis { degree, modes }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Values and reference gradients of every basis function at `(xi, eta)`.
    pub fn eval(&self, xi: f64, eta: f64) -> (Vec<f64>, Vec<[f64; 2]>) {
        let lam = [1.0 - xi - eta, xi, eta];
        let n = self.degree;
        let mut vals = Vec::with_capacity(self.len());
        let mut grads = Vec::with_capacity(self.len());
        let edge_tables: Vec<(Vec<f64>, Vec<f64>)> = (0..3)
            .map(|e| legendre_table(n, lam[(e + 1) % 3] - lam[e]))
            .collect();
        let (pa, da) = legendre_table(n, lam[1] - lam[0]);
        let (pb, db) = legendre_table(n, 2.0 * lam[2] - 1.0);
        for mode in &self.modes {
            match *mode {
                Mode::Vertex(i) => {
                    vals.push(lam[i]);
                    grads.push(BARY_GRAD[i]);
                }
                Mode::Edge { a, b, k } => {
                    let (p, d) = &edge_tables[a];
                    let s = [
                        BARY_GRAD[b][0] - BARY_GRAD[a][0],
                        BARY_GRAD[b][1] - BARY_GRAD[a][1],
                    ];
                    let prod = lam[a] * lam[b];
                    vals.push(prod * p[k]);
                    let mut g = [0.0; 2];
                    for c in 0..2 {
                        let dprod = BARY_GRAD[a][c] * lam[b] + lam[a] * BARY_GRAD[b][c];
                        g[c] = dprod * p[k] + prod * d[k] * s[c];
                    }
                    grads.push(g);
                }
                Mode::Bubble { i, j } => {
                    let prod = lam[0] * lam[1] * lam[2];
                    let f = pa[i] * pb[j];
                    vals.push(prod * f);
                    let mut g = [0.0; 2];
                    for c in 0..2 {
                        let dprod = BARY_GRAD[0][c] * lam[1] * lam[2]
                            + lam[0] * BARY_GRAD[1][c] * lam[2]
                            + lam[0] * lam[1] * BARY_GRAD[2][c];
                        let df = da[i] * (BARY_GRAD[1][c] - BARY_GRAD[0][c]) * pb[j]
                            + pa[i] * db[j] * 2.0 * BARY_GRAD[2][c];
                        g[c] = dprod * f + prod * df;
                    }
                    grads.push(g);
                }
            }
        }
        (vals, grads)
    }
}

#[derive(Debug, Clone)]
pub struct EdgeBasis {
    degree: usize,
}

impl EdgeBasis {
    pub fn new(degree: usize) -> Self {
        EdgeBasis { degree }
    }

    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Values and `d/dt` of the edge basis at `t` in [0, 1].
    pub fn eval(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let (p, d) = legendre_table(self.degree, 2.0 * t - 1.0);
        let mut vals = vec![1.0 - t, t];
        let mut ders = vec![-1.0, 1.0];
        for k in 0..self.degree.saturating_sub(1) {
            let prod = (1.0 - t) * t;
            vals.push(prod * p[k]);
            ders.push((1.0 - 2.0 * t) * p[k] + prod * 2.0 * d[k]);
        }
        (vals, ders)
    }
}
