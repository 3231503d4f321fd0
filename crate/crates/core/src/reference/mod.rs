//! Reference triangle and edge: bases, quadrature, trace and face-mass tables.

mod basis;
mod face_operator;
mod quadrature;

use faer::Mat;

pub use basis::{legendre_table, EdgeBasis, VolumeBasis};
pub use face_operator::{build_face_operator, FaceOperator, FluxKind, RobinClosure};
pub use quadrature::{gauss_legendre, EdgeRule, TriangleRule};

use crate::error::{Error, Result};
use crate::linalg;

pub const MAX_DEGREE: usize = 6;

/// Reference vertices; local edge `j` runs from vertex `j` to vertex `j + 1`.
pub const REF_VERTICES: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

/// Point on local edge `edge` at canonical parameter `t`. With `flip` the
/// canonical direction runs against the local vertex order.
pub fn edge_point(edge: usize, flip: bool, t: f64) -> [f64; 2] {
    let s = if flip { 1.0 - t } else { t };
    let a = REF_VERTICES[edge];
    let b = REF_VERTICES[(edge + 1) % 3];
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

#[derive(Debug, Clone)]
pub struct ReferenceElement {
    pub degree: usize,
    /// Volume basis size `(p+1)(p+2)/2`.
    pub nv: usize,
    /// Edge basis size `p+1`.
    pub nf: usize,
    pub volume_basis: VolumeBasis,
    pub edge_basis: EdgeBasis,
    pub volume_rule: TriangleRule,
    /// `[q][i]`
    pub volume_values: Vec<Vec<f64>>,
    /// `[q][i]`, gradients in reference coordinates
    pub volume_grads: Vec<Vec<[f64; 2]>>,
    pub edge_rule: EdgeRule,
    /// `[q][a]`
    pub edge_values: Vec<Vec<f64>>,
    /// `[q][a]`, derivative in the edge parameter
    pub edge_derivs: Vec<Vec<f64>>,
    /// Edge Gram matrix on [0, 1].
    pub edge_mass: Mat<f64>,
    pub edge_mass_inv: Mat<f64>,
    /// `∫ ψ_a' ψ_b' dt` on [0, 1].
    pub edge_stiffness: Mat<f64>,
    pub volume_mass: Mat<f64>,
    /// `[edge][flip]` → `[q][i]`: volume basis at the edge quadrature points.
    pub trace_values: Vec<[Vec<Vec<f64>>; 2]>,
    /// `[edge][flip]` → `E[a][i] = ∫_0^1 ψ_a φ_i dt`.
    pub coupling: Vec<[Mat<f64>; 2]>,
    /// `[edge][flip]` → edge-basis coefficients of the trace, `M^{-1} E`.
    pub trace: Vec<[Mat<f64>; 2]>,
}

/// Builds the reference tables for degree `p`.
pub fn build_reference(p: usize) -> Result<ReferenceElement> {
    if !(1..=MAX_DEGREE).contains(&p) {
        return Err(Error::Degree(p));
    }
    let volume_basis = VolumeBasis::new(p);
    let edge_basis = EdgeBasis::new(p);
    let nv = volume_basis.len();
    let nf = edge_basis.len();

    let volume_rule = TriangleRule::with_degree(2 * p + 2);
    let (volume_values, volume_grads): (Vec<_>, Vec<_>) = volume_rule
        .points
        .iter()
        .map(|x| volume_basis.eval(x[0], x[1]))
        .unzip();

    let edge_rule = EdgeRule::with_degree(2 * p + 2);
    let (edge_values, edge_derivs): (Vec<_>, Vec<_>) =
        edge_rule.points.iter().map(|&t| edge_basis.eval(t)).unzip();

    let mut edge_mass = Mat::<f64>::zeros(nf, nf);
    let mut edge_stiffness = Mat::<f64>::zeros(nf, nf);
    for (q, &w) in edge_rule.weights.iter().enumerate() {
        for a in 0..nf {
            for b in 0..nf {
                edge_mass[(a, b)] += w * edge_values[q][a] * edge_values[q][b];
                edge_stiffness[(a, b)] += w * edge_derivs[q][a] * edge_derivs[q][b];
            }
        }
    }
    let edge_mass_inv = linalg::inverse(&edge_mass);

    let mut volume_mass = Mat::<f64>::zeros(nv, nv);
    for (q, &w) in volume_rule.weights.iter().enumerate() {
        for i in 0..nv {
            for j in 0..nv {
                volume_mass[(i, j)] += w * volume_values[q][i] * volume_values[q][j];
            }
        }
    }

    let mut trace_values = Vec::with_capacity(3);
    let mut coupling = Vec::with_capacity(3);
    let mut trace = Vec::with_capacity(3);
    for edge in 0..3 {
        let mut tv: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];
        let mut cp: [Mat<f64>; 2] = [Mat::zeros(nf, nv), Mat::zeros(nf, nv)];
        let mut tr: [Mat<f64>; 2] = [Mat::zeros(nf, nv), Mat::zeros(nf, nv)];
        for (fi, flip) in [false, true].into_iter().enumerate() {
            tv[fi] = edge_rule
                .points
                .iter()
                .map(|&t| {
                    let x = edge_point(edge, flip, t);
                    volume_basis.eval(x[0], x[1]).0
                })
                .collect();
            let mut e = Mat::<f64>::zeros(nf, nv);
            for (q, &w) in edge_rule.weights.iter().enumerate() {
                for a in 0..nf {
                    for i in 0..nv {
                        e[(a, i)] += w * edge_values[q][a] * tv[fi][q][i];
                    }
                }
            }
            tr[fi] = &edge_mass_inv * &e;
            cp[fi] = e;
        }
        trace_values.push(tv);
        coupling.push(cp);
        trace.push(tr);
    }

    Ok(ReferenceElement {
        degree: p,
        nv,
        nf,
        volume_basis,
        edge_basis,
        volume_rule,
        volume_values,
        volume_grads,
        edge_rule,
        edge_values,
        edge_derivs,
        edge_mass,
        edge_mass_inv,
        edge_stiffness,
        volume_mass,
        trace_values,
        coupling,
        trace,
    })
}

impl ReferenceElement {
    /// Evaluates an edge polynomial given by its coefficients at `t`.
    pub fn eval_edge<T>(&self, coeffs: &[T], t: f64) -> T
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::iter::Sum<T>,
    {
        let (vals, _) = self.edge_basis.eval(t);
        coeffs.iter().zip(&vals).map(|(&c, &v)| c * v).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let r = build_reference(1).unwrap();
        assert_eq!((r.nv, r.nf), (3, 2));
        let r = build_reference(3).unwrap();
        assert_eq!((r.nv, r.nf), (10, 4));
        assert!(build_reference(0).is_err());
        assert!(build_reference(7).is_err());
    }

    #[test]
    fn constant_function_integrates_to_area() {
        // the vertex functions sum to one
        for p in 1..=6 {
            let r = build_reference(p).unwrap();
            let mut total = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    total += r.volume_mass[(i, j)];
                }
            }
            assert!((total - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn edge_mass_is_spd() {
        for p in 1..=6 {
            let r = build_reference(p).unwrap();
            assert!(linalg::max_abs_diff(&r.edge_mass, &r.edge_mass.transpose().to_owned()) < 1e-15);
            assert!(r.edge_mass.llt(faer::Side::Lower).is_ok());
        }
    }

    /// Trace coupling against hand-integrated monomials for p <= 2: on edge 0
    /// (t along xi, eta = 0) the vertex and edge modes reduce to 1-t, t and
    /// (1-t)t, whose products integrate to Beta-function values.
    #[test]
    fn trace_coupling_matches_analytic_integrals() {
        let beta = |a: i32, b: i32| {
            let f = |n: i32| (1..=n).map(f64::from).product::<f64>();
            f(a) * f(b) / f(a + b + 1)
        };
        let r = build_reference(2).unwrap();
        let e = &r.coupling[0][0];
        // (a, i) → powers of (1 - t) and t in ψ_a φ_i
        let cases = [
            ((0, 0), (2, 0)),
            ((0, 1), (1, 1)),
            ((1, 1), (0, 2)),
            ((2, 0), (2, 1)),
            ((2, 3), (2, 2)),
            ((1, 3), (1, 2)),
        ];
        for ((a, i), (pa, pb)) in cases {
            assert!((e[(a, i)] - beta(pa, pb)).abs() < 1e-13, "a={a} i={i}");
        }
        // vertex 2 does not touch edge 0
        for a in 0..3 {
            assert!(e[(a, 2)].abs() < 1e-15);
        }
    }

    #[test]
    fn trace_reproduces_volume_values_on_edge() {
        let r = build_reference(4).unwrap();
        for edge in 0..3 {
            for (fi, flip) in [false, true].into_iter().enumerate() {
                let t = 0.37;
                let x = edge_point(edge, flip, t);
                let (phi, _) = r.volume_basis.eval(x[0], x[1]);
                let (psi, _) = r.edge_basis.eval(t);
                for i in 0..r.nv {
                    let v: f64 = (0..r.nf).map(|a| r.trace[edge][fi][(a, i)] * psi[a]).sum();
                    assert!((v - phi[i]).abs() < 1e-12);
                }
            }
        }
    }
}
