use faer::Mat;
use rayon::prelude::*;

use super::{trace_offset, LinearOperator};
use crate::error::Result;
use crate::fields::Fields;
use crate::linalg::{self, Block, SparseMatrix};
use crate::local::{assemble_hdg_local, ElementSystem, LocalSolution};
use crate::mesh::BoundaryTag;
use crate::problem::Problem;
use crate::C64;

/// Statically condensed HDG trace system in coefficient form.
///
/// Per side, the flux relation gives `p̂ + Z n·û = P + Z U =: Y` with
/// `Z = A` or `η_K`. Conservation across an interior face then fixes `p̂` as
/// a weighted sum of the two `Y`, and a boundary condition fixes it from the
/// single `Y` and the datum. With `Y = H p̂ + h₀` from the local solves,
/// each face row reads `p̂_F - Σ_K C_{K,F} Y_{K,F} = r_F`.
#[derive(Debug)]
pub struct HdgSystem<'a> {
    pub problem: &'a Problem,
    systems: Vec<ElementSystem>,
    matrix: SparseMatrix,
    rhs: Vec<C64>,
}

pub fn hdg_system(problem: &Problem) -> Result<HdgSystem<'_>> {
    HdgSystem::new(problem)
}

/// `C_{K,F}` for one side.
fn closure(problem: &Problem, k: usize, j: usize) -> Mat<f64> {
    let mesh = &problem.mesh;
    let face = &mesh.faces[mesh.element_faces[k][j]];
    let op = problem.face_op(k, j);
    let nf = problem.nf();
    let id = linalg::identity(nf);
    match face.tag {
        BoundaryTag::Interior => {
            let side = problem.side_coeffs(k, j);
            let w = if op.a.is_some() { 0.5 } else { side.eta_other / (side.eta_own + side.eta_other) };
            id * w
        }
        BoundaryTag::Dirichlet => Mat::zeros(nf, nf),
        BoundaryTag::Neumann => id,
        BoundaryTag::Robin => op.robin.as_ref().expect("Robin faces carry a closure").b_plus_inv.clone(),
    }
}

impl<'a> HdgSystem<'a> {
    pub fn new(problem: &'a Problem) -> Result<Self> {
        let mesh = &problem.mesh;
        let nf = problem.nf();
        let n = problem.trace_dim();
        let systems = (0..problem.num_elements())
            .into_par_iter()
            .map(|k| assemble_hdg_local(problem, k))
            .collect::<Result<Vec<_>>>()?;
        let with_source = problem.has_volume_source();
        let parts: Vec<(Vec<(usize, usize, C64)>, Vec<(usize, C64)>)> = systems
            .par_iter()
            .enumerate()
            .map(|(k, sys)| {
                let h: Block = sys.transfer_block();
                let h0 = if with_source { sys.source_outputs() } else { linalg::zeros(3 * nf) };
                let mut trip = Vec::new();
                let mut rhs = Vec::new();
                for j in 0..3 {
                    let row0 = trace_offset(problem, mesh.element_faces[k][j]);
                    let cl = closure(problem, k, j);
                    for jj in 0..3 {
                        let col0 = trace_offset(problem, mesh.element_faces[k][jj]);
                        for a in 0..nf {
                            for b in 0..nf {
                                let v: C64 = (0..nf).map(|c| cl[(a, c)] * h.get(j * nf + c, jj * nf + b)).sum();
                                if v != C64::new(0.0, 0.0) {
                                    trip.push((row0 + a, col0 + b, -v));
                                }
                            }
                        }
                    }
                    if with_source {
                        let y0 = linalg::rmatvec(&cl, &h0[j * nf..(j + 1) * nf]);
                        rhs.extend(y0.into_iter().enumerate().map(|(a, v)| (row0 + a, v)));
                    }
                }
                (trip, rhs)
            })
            .collect();

        let mut trip: Vec<(usize, usize, C64)> = (0..n).map(|i| (i, i, C64::new(1.0, 0.0))).collect();
        let mut rhs = linalg::zeros(n);
        for (t, r) in parts {
            trip.extend(t);
            for (i, v) in r {
                rhs[i] += v;
            }
        }
        for (f, face) in mesh.faces.iter().enumerate() {
            if face.tag == BoundaryTag::Interior {
                continue;
            }
            let k = face.owner.element;
            let op = &problem.face_ops[f];
            let eta = mesh.coeffs(k).eta;
            let s = &problem.boundary_data[f];
            let z = |x: &[C64]| match &op.a {
                Some(a) => linalg::rmatvec(a, x),
                None => x.iter().map(|v| v * eta).collect(),
            };
            let r: Vec<C64> = match face.tag {
                BoundaryTag::Dirichlet => s.clone(),
                BoundaryTag::Neumann => z(s).into_iter().map(|v| -v).collect(),
                BoundaryTag::Robin => {
                    let robin = op.robin.as_ref().expect("Robin faces carry a closure");
                    linalg::rmatvec(&robin.b_plus_inv, &z(s)).into_iter().map(|v| v / eta).collect()
                }
                BoundaryTag::Interior => unreachable!(),
            };
            let off = trace_offset(problem, f);
            for (a, v) in r.into_iter().enumerate() {
                rhs[off + a] += v;
            }
        }
        Ok(HdgSystem {
            problem,
            systems,
            matrix: SparseMatrix::from_triplets(n, n, trip),
            rhs,
        })
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[C64] {
        &self.rhs
    }

    pub fn solve_direct(&self) -> Result<Vec<C64>> {
        self.matrix.solve(&self.rhs)
    }

    /// Element fields from the numerical trace.
    pub fn reconstruct(&self, p_hat: &[C64]) -> Fields {
        let mesh = &self.problem.mesh;
        let nf = self.problem.nf();
        let nv = self.problem.nv();
        self.systems
            .par_iter()
            .enumerate()
            .map(|(k, sys)| {
                let mut d = Vec::with_capacity(3 * nf);
                for f in mesh.element_faces[k] {
                    let off = trace_offset(self.problem, f);
                    d.extend_from_slice(&p_hat[off..off + nf]);
                }
                LocalSolution::from_stacked(&sys.solve(&d, true), nv)
            })
            .collect()
    }
}

impl LinearOperator for HdgSystem<'_> {
    fn dim(&self) -> usize {
        self.matrix.nrows
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.matrix.matvec(x, y)
    }

    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        self.matrix.matvec_adjoint(x, y)
    }
}
