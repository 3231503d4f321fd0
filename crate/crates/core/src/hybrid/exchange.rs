use faer::Mat;

use super::transmission_offset;
use crate::mesh::BoundaryTag;
use crate::problem::Problem;
use crate::{linalg, C64};

#[derive(Debug, Clone)]
enum Rule {
    /// Interior face: take the other side's block at this offset.
    Swap(usize),
    Scale(f64),
    Matrix(Mat<f64>),
}

/// Exchange operator `Π` and right-hand side `b` of the CHDG system.
#[derive(Debug, Clone)]
pub struct Exchange {
    nf: usize,
    rules: Vec<Rule>,
    rhs: Vec<C64>,
}

impl Exchange {
    pub fn new(problem: &Problem) -> Self {
        let nf = problem.nf();
        let mesh = &problem.mesh;
        let mut rules = Vec::with_capacity(3 * mesh.num_elements());
        let mut rhs = linalg::zeros(problem.transmission_dim());
        for k in 0..mesh.num_elements() {
            for j in 0..3 {
                let f = mesh.element_faces[k][j];
                let face = &mesh.faces[f];
                let op = &problem.face_ops[f];
                let eta = mesh.coeffs(k).eta;
                let s = &problem.boundary_data[f];
                let off = transmission_offset(problem, k, j);
                let symmetric = op.a.is_some();
                let (rule, b): (Rule, Vec<C64>) = match face.tag {
                    BoundaryTag::Interior => {
                        let other = mesh.across(k, j).expect("interior face has a neighbor");
                        (Rule::Swap(transmission_offset(problem, other.element, other.local)), Vec::new())
                    }
                    BoundaryTag::Dirichlet => {
                        let b = if symmetric { op.apply_a_inv(s) } else { s.clone() };
                        (Rule::Scale(-1.0), b.iter().map(|v| v * 2.0).collect())
                    }
                    BoundaryTag::Neumann => {
                        let scale = if symmetric { -2.0 } else { -2.0 * eta };
                        (Rule::Scale(1.0), s.iter().map(|v| v * scale).collect())
                    }
                    BoundaryTag::Robin => {
                        let robin = op.robin.as_ref().expect("Robin faces carry a closure");
                        if symmetric {
                            let b = linalg::rmatvec(&robin.b_plus_inv, s);
                            (Rule::Matrix(robin.b_plus_inv_b_minus.clone()), b.iter().map(|v| v * (2.0 / eta)).collect())
                        } else {
                            (Rule::Scale(0.0), s.clone())
                        }
                    }
                };
                if !b.is_empty() {
                    rhs[off..off + nf].copy_from_slice(&b);
                }
                rules.push(rule);
            }
        }
        Exchange { nf, rules, rhs }
    }

    pub fn dim(&self) -> usize {
        self.rules.len() * self.nf
    }

    /// `b`, the boundary part of the right-hand side.
    pub fn rhs(&self) -> &[C64] {
        &self.rhs
    }

    pub fn apply(&self, g: &[C64], out: &mut [C64]) {
        self.apply_impl(g, out, false)
    }

    /// `Πᵀ`; the coefficients are real so this is also the adjoint.
    pub fn apply_transpose(&self, g: &[C64], out: &mut [C64]) {
        self.apply_impl(g, out, true)
    }

    fn apply_impl(&self, g: &[C64], out: &mut [C64], transpose: bool) {
        let nf = self.nf;
        for (i, rule) in self.rules.iter().enumerate() {
            let dst = &mut out[i * nf..(i + 1) * nf];
            let src = &g[i * nf..(i + 1) * nf];
            match rule {
                Rule::Swap(o) => dst.copy_from_slice(&g[*o..*o + nf]),
                Rule::Scale(s) => {
                    for (d, v) in dst.iter_mut().zip(src) {
                        *d = v * *s;
                    }
                }
                Rule::Matrix(m) => {
                    let v = if transpose { linalg::rmatvec_t(m, src) } else { linalg::rmatvec(m, src) };
                    dst.copy_from_slice(&v);
                }
            }
        }
    }

    /// Sparse pattern of `Π` as `(row, col, value)`; row and col index transmission entries.
    pub(crate) fn entries(&self) -> Vec<(usize, usize, f64)> {
        let nf = self.nf;
        let mut e = Vec::new();
        for (i, rule) in self.rules.iter().enumerate() {
            match rule {
                Rule::Swap(o) => e.extend((0..nf).map(|a| (i * nf + a, o + a, 1.0))),
                Rule::Scale(s) => {
                    if *s != 0.0 {
                        e.extend((0..nf).map(|a| (i * nf + a, i * nf + a, *s)));
                    }
                }
                Rule::Matrix(m) => {
                    for a in 0..nf {
                        for b in 0..nf {
                            if m[(a, b)] != 0.0 {
                                e.push((i * nf + a, i * nf + b, m[(a, b)]));
                            }
                        }
                    }
                }
            }
        }
        e
    }
}

/// `(Πg, b)` for a transmission vector `g`.
pub fn exchange(problem: &Problem, g: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let ex = Exchange::new(problem);
    let mut out = linalg::zeros(g.len());
    ex.apply(g, &mut out);
    (out, ex.rhs().to_vec())
}

impl super::LinearOperator for Exchange {
    fn dim(&self) -> usize {
        Exchange::dim(self)
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        Exchange::apply(self, x, y)
    }

    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        self.apply_transpose(x, y)
    }
}
