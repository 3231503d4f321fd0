//! Element-local forms and solves.
//!
//! Unknowns on an element are ordered `(p; u_x; u_y)`, each with `N_v`
//! coefficients. Face terms are written with the trace maps `P = T p` and
//! `U = n_x T u_x + n_y T u_y`, where `T` gives edge-basis coefficients of a
//! volume function's trace in the face's canonical parameter. A face flux is
//! then `n·û = C_u x + D_u d` and `p̂ = C_p x + D_p d` with `d` the face datum
//! (incoming `g⊖` for CHDG, `p̂` itself for HDG), and the local matrix is
//!
//! ```text
//! L = V + Σ_F (Pᵀ M_F C_u + Uᵀ M_F C_p),   data_F = -(Pᵀ M_F D_u + Uᵀ M_F D_p).
//! ```
//!
//! For CHDG the flux maps come from [`crate::fluxes::flux_matrices`]. For HDG
//! they are `n·û = U + τ(P - p̂)`, `τ = A⁻¹` (symmetric) or `η_K⁻¹` (upwind),
//! which is the flux relation solved for `n·û`.

use faer::linalg::solvers::PartialPivLu;
use faer::prelude::*;
use faer::Mat;

use crate::error::{Error, Result};
use crate::fluxes::flux_matrices;
use crate::linalg::{self, Block};
use crate::mesh::Mesh;
use crate::problem::Problem;
use crate::reference::ReferenceElement;
use crate::C64;

/// Volume matrices of one element in physical coordinates.
#[derive(Debug, Clone)]
pub struct VolumeForms {
    pub mass: Mat<f64>,
    /// `gx[(i, j)] = ∫ ∂_x φ_i φ_j`
    pub gx: Mat<f64>,
    pub gy: Mat<f64>,
    /// `∫ φ_i`
    pub load: Vec<f64>,
}

pub fn assemble_volume_forms(mesh: &Mesh, k: usize, reference: &ReferenceElement) -> Result<VolumeForms> {
    let geo = mesh.geometry(k);
    if !(geo.det > 0.0) {
        return Err(Error::Mesh(format!("element {k} is degenerate")));
    }
    let nv = reference.nv;
    let mut mass = Mat::<f64>::zeros(nv, nv);
    let mut gx = Mat::<f64>::zeros(nv, nv);
    let mut gy = Mat::<f64>::zeros(nv, nv);
    let mut load = vec![0.0; nv];
    for (q, &w) in reference.volume_rule.weights.iter().enumerate() {
        let wq = w * geo.det;
        let phi = &reference.volume_values[q];
        let grads: Vec<[f64; 2]> = reference.volume_grads[q].iter().map(|&g| geo.grad(g)).collect();
        for i in 0..nv {
            load[i] += wq * phi[i];
            for j in 0..nv {
                mass[(i, j)] += wq * phi[i] * phi[j];
                gx[(i, j)] += wq * grads[i][0] * phi[j];
                gy[(i, j)] += wq * grads[i][1] * phi[j];
            }
        }
    }
    Ok(VolumeForms { mass, gx, gy, load })
}

/// Trace map and outward normal of one local face.
#[derive(Debug, Clone)]
pub struct FaceTrace {
    pub face: usize,
    pub trace: Mat<f64>,
    pub normal: [f64; 2],
}

impl FaceTrace {
    /// `P`, as an `N_f × 3N_v` map on the element unknowns.
    pub fn p_map(&self, nv: usize) -> Mat<f64> {
        let nf = self.trace.nrows();
        Mat::from_fn(nf, 3 * nv, |a, c| if c < nv { self.trace[(a, c)] } else { 0.0 })
    }

    /// `U`, as an `N_f × 3N_v` map on the element unknowns.
    pub fn un_map(&self, nv: usize) -> Mat<f64> {
        let nf = self.trace.nrows();
        Mat::from_fn(nf, 3 * nv, |a, c| match c / nv {
            1 => self.normal[0] * self.trace[(a, c - nv)],
            2 => self.normal[1] * self.trace[(a, c - 2 * nv)],
            _ => 0.0,
        })
    }
}

pub fn face_traces(mesh: &Mesh, k: usize, reference: &ReferenceElement) -> [FaceTrace; 3] {
    std::array::from_fn(|j| FaceTrace {
        face: mesh.element_faces[k][j],
        trace: reference.trace[j][mesh.flip(k, j) as usize].clone(),
        normal: mesh.normal(k, j),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalKind {
    Chdg,
    Hdg,
}

/// Element fields `(p, u_x, u_y)` as coefficient vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSolution {
    pub p: Vec<C64>,
    pub ux: Vec<C64>,
    pub uy: Vec<C64>,
}

impl LocalSolution {
    pub fn zeros(nv: usize) -> Self {
        LocalSolution {
            p: linalg::zeros(nv),
            ux: linalg::zeros(nv),
            uy: linalg::zeros(nv),
        }
    }

    pub fn from_stacked(x: &[C64], nv: usize) -> Self {
        LocalSolution {
            p: x[..nv].to_vec(),
            ux: x[nv..2 * nv].to_vec(),
            uy: x[2 * nv..3 * nv].to_vec(),
        }
    }

    pub fn stacked(&self) -> Vec<C64> {
        let mut v = self.p.clone();
        v.extend_from_slice(&self.ux);
        v.extend_from_slice(&self.uy);
        v
    }
}

/// Factorized local problem of one element.
pub struct ElementSystem {
    pub element: usize,
    pub kind: LocalKind,
    pub matrix: Mat<C64>,
    lu: PartialPivLu<C64>,
    /// `3N_v × 3N_f`; column block `j` multiplies the datum on local face `j`.
    pub data: Mat<C64>,
    /// Volume source term in the `p` rows.
    pub load: Vec<C64>,
    /// `3N_f × 3N_v`; per face, `g⊕` (CHDG) or `P + Z U` (HDG).
    pub outputs: Mat<f64>,
}

impl std::fmt::Debug for ElementSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ElementSystem")
            .field("element", &self.element)
            .field("kind", &self.kind)
            .field("size", &self.matrix.nrows())
            .finish()
    }
}

fn add_real(target: &mut Mat<C64>, m: &Mat<f64>, row0: usize, col0: usize, scale: f64) {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            target[(row0 + i, col0 + j)] += C64::new(scale * m[(i, j)], 0.0);
        }
    }
}

fn assemble(problem: &Problem, k: usize, kind: LocalKind) -> Result<ElementSystem> {
    let reference = &problem.reference;
    let (nv, nf) = (reference.nv, reference.nf);
    let n3 = 3 * nv;
    let coeffs = problem.mesh.coeffs(k);
    let vol = assemble_volume_forms(&problem.mesh, k, reference)?;

    let mut matrix = Mat::<C64>::zeros(n3, n3);
    let iw_p = C64::new(0.0, -coeffs.kappa / coeffs.eta);
    let iw_u = C64::new(0.0, -coeffs.kappa * coeffs.eta);
    for i in 0..nv {
        for j in 0..nv {
            let m = vol.mass[(i, j)];
            matrix[(i, j)] += iw_p * m;
            matrix[(nv + i, nv + j)] += iw_u * m;
            matrix[(2 * nv + i, 2 * nv + j)] += iw_u * m;
        }
    }
    add_real(&mut matrix, &vol.gx, 0, nv, -1.0);
    add_real(&mut matrix, &vol.gy, 0, 2 * nv, -1.0);
    add_real(&mut matrix, &vol.gx, nv, 0, -1.0);
    add_real(&mut matrix, &vol.gy, 2 * nv, 0, -1.0);

    let mut data = Mat::<C64>::zeros(n3, 3 * nf);
    let mut outputs = Mat::<f64>::zeros(3 * nf, n3);
    let id = linalg::identity(nf);
    for (j, ft) in face_traces(&problem.mesh, k, reference).iter().enumerate() {
        let op = problem.face_op(k, j);
        let side = problem.side_coeffs(k, j);
        let pm = ft.p_map(nv);
        let um = ft.un_map(nv);
        let (cu, cp, du, dp, out) = match kind {
            LocalKind::Chdg => {
                let fm = flux_matrices(side, op);
                let q = &fm.out_p * &pm + &fm.out_u * &um;
                (&fm.hat_u_out * &q, &fm.hat_p_out * &q, fm.hat_u_in, fm.hat_p_in, q)
            }
            LocalKind::Hdg => {
                let (tau, z) = match (&op.a, &op.a_inv) {
                    (Some(a), Some(a_inv)) => (a_inv.clone(), a.clone()),
                    _ => (&id * (1.0 / side.eta_own), &id * side.eta_own),
                };
                let cu = &um + &tau * &pm;
                let out = &pm + &z * &um;
                (cu, Mat::zeros(nf, n3), &tau * -1.0, id.clone(), out)
            }
        };
        let mass = &op.mass;
        let face_block = pm.transpose() * (mass * &cu) + um.transpose() * (mass * &cp);
        add_real(&mut matrix, &face_block, 0, 0, 1.0);
        let data_block = pm.transpose() * (mass * &du) + um.transpose() * (mass * &dp);
        add_real(&mut data, &data_block, 0, j * nf, -1.0);
        for a in 0..nf {
            for c in 0..n3 {
                outputs[(j * nf + a, c)] = out[(a, c)];
            }
        }
    }

    let f = problem.sources[k];
    let mut load = linalg::zeros(n3);
    for i in 0..nv {
        load[i] = f * vol.load[i];
    }
    let lu = matrix.partial_piv_lu();
    Ok(ElementSystem {
        element: k,
        kind,
        matrix,
        lu,
        data,
        load,
        outputs,
    })
}

/// Local CHDG problem with incoming transmission data on the element faces.
pub fn assemble_chdg_local(problem: &Problem, k: usize) -> Result<ElementSystem> {
    assemble(problem, k, LocalKind::Chdg)
}

/// Local HDG problem with the numerical trace `p̂` as face datum.
pub fn assemble_hdg_local(problem: &Problem, k: usize) -> Result<ElementSystem> {
    assemble(problem, k, LocalKind::Hdg)
}

impl ElementSystem {
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    fn solve_mat(&self, rhs: &Mat<C64>) -> Mat<C64> {
        self.lu.solve(rhs)
    }

    /// Solves with face data `d` (all three faces stacked) and optionally the volume source.
    pub fn solve(&self, d: &[C64], with_source: bool) -> Vec<C64> {
        let n = self.size();
        let mut rhs = linalg::cmatvec(&self.data, d);
        if with_source {
            linalg::axpy(C64::new(1.0, 0.0), &self.load, &mut rhs);
        }
        let b = Mat::from_fn(n, 1, |i, _| rhs[i]);
        let x = self.solve_mat(&b);
        (0..n).map(|i| x[(i, 0)]).collect()
    }

    /// `L⁻¹ data`: element unknowns for every unit face datum.
    pub fn unit_responses(&self) -> Mat<C64> {
        self.solve_mat(&self.data)
    }

    /// `L⁻¹ load`.
    pub fn source_response(&self) -> Vec<C64> {
        let n = self.size();
        let b = Mat::from_fn(n, 1, |i, _| self.load[i]);
        let x = self.solve_mat(&b);
        (0..n).map(|i| x[(i, 0)]).collect()
    }

    /// Dense map from face data to outputs, `outputs · L⁻¹ · data`.
    pub fn transfer_block(&self) -> Block {
        let out = linalg::to_complex(&self.outputs);
        Block::from_mat(&(&out * self.unit_responses()))
    }

    /// Outputs of the source-only solve.
    pub fn source_outputs(&self) -> Vec<C64> {
        linalg::rmatvec(&self.outputs, &self.source_response())
    }

    /// Relative residual of `L x = data·d + load`, for verification.
    pub fn residual(&self, x: &[C64], d: &[C64], with_source: bool) -> f64 {
        let lx = linalg::cmatvec(&self.matrix, x);
        let mut rhs = linalg::cmatvec(&self.data, d);
        if with_source {
            linalg::axpy(C64::new(1.0, 0.0), &self.load, &mut rhs);
        }
        let diff: Vec<C64> = lx.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        linalg::norm(&diff) / linalg::norm(&rhs).max(f64::MIN_POSITIVE)
    }
}

/// Local CHDG solve: element fields and outgoing transmission variables.
pub fn local_scatter(problem: &Problem, system: &ElementSystem, g_in: &[C64], with_source: bool) -> (LocalSolution, Vec<C64>) {
    debug_assert_eq!(system.kind, LocalKind::Chdg);
    let x = system.solve(g_in, with_source);
    let g_out = linalg::rmatvec(&system.outputs, &x);
    (LocalSolution::from_stacked(&x, problem.nv()), g_out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundaryTag, Material};
    use crate::reference::{edge_point, FluxKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn random_element(rng: &mut ChaCha8Rng, degree: usize, flux: FluxKind) -> Problem {
        let mut v: Vec<[f64; 2]> = (0..3).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
        let area = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
        if area < 0.0 {
            v.swap(1, 2);
        }
        if area.abs() < 0.05 {
            v[2] = [v[0][0] - (v[1][1] - v[0][1]), v[0][1] + (v[1][0] - v[0][0])];
        }
        let mesh = Mesh::from_parts(v, vec![[0, 1, 2]], vec![1], &HashMap::new(), BoundaryTag::Robin).unwrap();
        let m = Material {
            omega: rng.random_range(1.0..30.0),
            c: rng.random_range(0.5..2.0),
            rho: rng.random_range(0.5..2.0),
        };
        let mesh = mesh.with_element_coefficients(&[m]).unwrap();
        Problem::homogeneous(mesh, degree, flux).unwrap()
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    }

    /// Residuals of both local equations evaluated pointwise by quadrature,
    /// with fluxes given as functions of (face, t, p, n·u).
    fn form_residual(
        problem: &Problem,
        sol: &LocalSolution,
        flux: &dyn Fn(usize, f64, C64, C64) -> (C64, C64),
    ) -> f64 {
        let r = &problem.reference;
        let mesh = &problem.mesh;
        let c = mesh.coeffs(0);
        let geo = mesh.geometry(0);
        let nv = r.nv;
        let eval = |vals: &[f64], coef: &[C64]| -> C64 { coef.iter().zip(vals).map(|(a, b)| a * b).sum() };
        let mut res = vec![C64::new(0.0, 0.0); 3 * nv];
        let i = C64::i();
        for (q, &w) in r.volume_rule.weights.iter().enumerate() {
            let wq = w * geo.det;
            let phi = &r.volume_values[q];
            let (p, ux, uy) = (eval(phi, &sol.p), eval(phi, &sol.ux), eval(phi, &sol.uy));
            for a in 0..nv {
                let g = geo.grad(r.volume_grads[q][a]);
                res[a] += (-i * c.kappa / c.eta * p * phi[a] - ux * g[0] - uy * g[1] - problem.sources[0] * phi[a]) * wq;
                res[nv + a] += (-i * c.kappa * c.eta * ux * phi[a] - p * g[0]) * wq;
                res[2 * nv + a] += (-i * c.kappa * c.eta * uy * phi[a] - p * g[1]) * wq;
            }
        }
        for j in 0..3 {
            let flip = mesh.flip(0, j);
            let n = mesh.normal(0, j);
            let len = mesh.faces[mesh.element_faces[0][j]].length;
            for (q, (&t, &w)) in r.edge_rule.points.iter().zip(&r.edge_rule.weights).enumerate() {
                let phi = &r.trace_values[j][flip as usize][q];
                let x = edge_point(j, flip, t);
                assert!(x[0] >= -1e-15 && x[1] >= -1e-15);
                let (p, ux, uy) = (eval(phi, &sol.p), eval(phi, &sol.ux), eval(phi, &sol.uy));
                let un = ux * n[0] + uy * n[1];
                let (p_hat, un_hat) = flux(j, t, p, un);
                for a in 0..nv {
                    res[a] += un_hat * phi[a] * w * len;
                    res[nv + a] += p_hat * n[0] * phi[a] * w * len;
                    res[2 * nv + a] += p_hat * n[1] * phi[a] * w * len;
                }
            }
        }
        linalg::norm(&res)
    }

    fn edge_eval(r: &ReferenceElement, coef: &[C64], t: f64) -> C64 {
        r.eval_edge(coef, t)
    }

    #[test]
    fn volume_forms_integrate_by_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for degree in 1..=4 {
            let pb = random_element(&mut rng, degree, FluxKind::Sym0);
            let r = &pb.reference;
            let vol = assemble_volume_forms(&pb.mesh, 0, r).unwrap();
            assert!((vol.load.iter().take(3).sum::<f64>() - pb.mesh.area(0)).abs() < 1e-13);
            for (g, dir) in [(&vol.gx, 0), (&vol.gy, 1)] {
                let mut boundary = Mat::<f64>::zeros(r.nv, r.nv);
                for ft in face_traces(&pb.mesh, 0, r) {
                    let m = &pb.face_ops[ft.face].mass;
                    boundary = boundary + (ft.trace.transpose() * (m * &ft.trace)) * ft.normal[dir];
                }
                let sum = g + g.transpose();
                assert!(linalg::max_abs_diff(&sum, &boundary) < 1e-12 * (1.0 + boundary.norm_max()));
            }
            // constants have zero gradient
            for j in 0..r.nv {
                let row: f64 = (0..3).map(|i| vol.gx[(i, j)]).sum();
                assert!(row.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_data_gives_zero_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for flux in [FluxKind::Upwind, FluxKind::Sym0, FluxKind::Sym2] {
            let pb = random_element(&mut rng, 3, flux);
            for sys in [assemble_chdg_local(&pb, 0).unwrap(), assemble_hdg_local(&pb, 0).unwrap()] {
                let x = sys.solve(&linalg::zeros(3 * pb.nf()), true);
                assert!(linalg::norm(&x) == 0.0);
            }
        }
    }

    #[test]
    fn lemma_energy_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for flux in [FluxKind::Sym0, FluxKind::Sym2] {
            for _ in 0..10 {
                let pb = random_element(&mut rng, 3, flux);
                let sys = assemble_chdg_local(&pb, 0).unwrap();
                let nf = pb.nf();
                for _ in 0..10 {
                    let g_in = random_vec(&mut rng, 3 * nf);
                    let (sol, g_out) = local_scatter(&pb, &sys, &g_in, false);
                    let x = sol.stacked();
                    let (mut lhs, mut rhs) = (0.0, 0.0);
                    for (j, ft) in face_traces(&pb.mesh, 0, &pb.reference).iter().enumerate() {
                        let op = &pb.face_ops[ft.face];
                        let p = linalg::rmatvec(&ft.p_map(pb.nv()), &x);
                        let un = linalg::rmatvec(&ft.un_map(pb.nv()), &x);
                        let gi = &g_in[j * nf..(j + 1) * nf];
                        let minus: Vec<C64> = op.apply_a_inv(&p).iter().zip(&un).zip(gi).map(|((a, b), c)| a - b - c).collect();
                        lhs += op.a_norm_sqr(&g_out[j * nf..(j + 1) * nf]) + op.a_norm_sqr(&minus);
                        rhs += op.a_norm_sqr(gi);
                    }
                    assert!((lhs - rhs).abs() < 1e-11 * rhs, "{flux:?}: {lhs} vs {rhs}");
                }
            }
        }
    }

    #[test]
    fn scatter_contracts_in_the_a_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for flux in [FluxKind::Sym0, FluxKind::Sym2] {
            let pb = random_element(&mut rng, 2, flux);
            let sys = assemble_chdg_local(&pb, 0).unwrap();
            let nf = pb.nf();
            for _ in 0..50 {
                let g_in = random_vec(&mut rng, 3 * nf);
                let (_, g_out) = local_scatter(&pb, &sys, &g_in, false);
                let norm = |g: &[C64]| -> f64 {
                    (0..3).map(|j| pb.face_op(0, j).a_norm_sqr(&g[j * nf..(j + 1) * nf])).sum::<f64>()
                };
                let (a, b) = (norm(&g_out), norm(&g_in));
                assert!(a < b - 1e-14 * b);
            }
        }
    }

    #[test]
    fn chdg_local_matches_quadrature_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for flux in [FluxKind::Upwind, FluxKind::Sym0] {
            let pb = random_element(&mut rng, 3, flux);
            let sys = assemble_chdg_local(&pb, 0).unwrap();
            let nf = pb.nf();
            let g_in = random_vec(&mut rng, 3 * nf);
            let (sol, _) = local_scatter(&pb, &sys, &g_in, false);
            let eta = pb.mesh.coeffs(0).eta;
            let r = &pb.reference;
            let res = form_residual(&pb, &sol, &|j, t, p, un| {
                let gi = edge_eval(r, &g_in[j * nf..(j + 1) * nf], t);
                match flux {
                    // boundary faces: η' = η
                    FluxKind::Upwind => {
                        let go = p + un * eta;
                        ((go + gi) * 0.5, (go - gi) / (2.0 * eta))
                    }
                    _ => {
                        let mu = eta;
                        let go = p / mu + un;
                        ((go + gi) * (0.5 * mu), (go - gi) * 0.5)
                    }
                }
            });
            assert!(res < 1e-11 * linalg::norm(&g_in), "{flux:?}: {res}");
        }
    }

    #[test]
    fn hdg_local_matches_quadrature_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for flux in [FluxKind::Upwind, FluxKind::Sym0] {
            let pb = random_element(&mut rng, 3, flux);
            let sys = assemble_hdg_local(&pb, 0).unwrap();
            let nf = pb.nf();
            let p_hat = random_vec(&mut rng, 3 * nf);
            let x = sys.solve(&p_hat, false);
            let sol = LocalSolution::from_stacked(&x, pb.nv());
            let tau = 1.0 / pb.mesh.coeffs(0).eta;
            let r = &pb.reference;
            let res = form_residual(&pb, &sol, &|j, t, p, un| {
                let ph = edge_eval(r, &p_hat[j * nf..(j + 1) * nf], t);
                (ph, un + (p - ph) * tau)
            });
            assert!(res < 1e-11 * linalg::norm(&p_hat), "{flux:?}: {res}");
        }
    }

    #[test]
    fn volume_source_response() {
        use crate::analytic::ReferenceField;
        struct Src;
        impl ReferenceField for Src {
            fn eval(&self, _: [f64; 2], _: usize) -> (C64, [C64; 2]) {
                (C64::new(0.0, 0.0), [C64::new(0.0, 0.0); 2])
            }
            fn volume_source(&self, c: &crate::mesh::ElementCoeffs) -> C64 {
                -1.0 / (C64::i() * c.kappa * c.eta)
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pb0 = random_element(&mut rng, 3, FluxKind::Sym0);
        let pb = Problem::new(pb0.mesh.clone(), 3, FluxKind::Sym0, &Src).unwrap();
        let sys = assemble_chdg_local(&pb, 0).unwrap();
        let zero = linalg::zeros(3 * pb.nf());
        let (sol, _) = local_scatter(&pb, &sys, &zero, true);
        assert!(linalg::norm(&sol.p) > 1e-6);
        let eta = pb.mesh.coeffs(0).eta;
        let res = form_residual(&pb, &sol, &|_, _, p, un| {
            let go = p / eta + un;
            (go * (0.5 * eta), go * 0.5)
        });
        assert!(res < 1e-11 * pb.sources[0].norm(), "{res}");
    }
}
