//! Discrete physical fields and the energy norm
//! `‖p,u‖²_E = Σ_K ‖p‖²/(2ρc²) + ½ρ‖u‖²`.

use rayon::prelude::*;

use crate::analytic::ReferenceField;
use crate::local::{assemble_volume_forms, LocalSolution};
use crate::problem::Problem;
use crate::reference::TriangleRule;
use crate::{linalg, C64};

pub type Fields = Vec<LocalSolution>;

fn mass_norm_sqr(m: &faer::Mat<f64>, x: &[C64]) -> f64 {
    linalg::dot(x, &linalg::rmatvec(m, x)).re
}

/// Squared energy norm of `a - b` (or of `a` alone), computed with exact mass matrices.
/// Per-element terms are summed in order so results do not depend on thread scheduling.
fn energy_sqr(problem: &Problem, a: &Fields, b: Option<&Fields>) -> f64 {
    (0..problem.num_elements())
        .into_par_iter()
        .map(|k| {
            let vol = assemble_volume_forms(&problem.mesh, k, &problem.reference).expect("validated mesh");
            let c = problem.mesh.coeffs(k);
            let diff = |x: &[C64], y: Option<&[C64]>| -> Vec<C64> {
                match y {
                    Some(y) => x.iter().zip(y).map(|(u, v)| u - v).collect(),
                    None => x.to_vec(),
                }
            };
            let bk = b.map(|b| &b[k]);
            let p = diff(&a[k].p, bk.map(|s| s.p.as_slice()));
            let ux = diff(&a[k].ux, bk.map(|s| s.ux.as_slice()));
            let uy = diff(&a[k].uy, bk.map(|s| s.uy.as_slice()));
            mass_norm_sqr(&vol.mass, &p) / (2.0 * c.rho * c.c * c.c)
                + 0.5 * c.rho * (mass_norm_sqr(&vol.mass, &ux) + mass_norm_sqr(&vol.mass, &uy))
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum()
}

pub fn energy_norm(problem: &Problem, fields: &Fields) -> f64 {
    energy_sqr(problem, fields, None).sqrt()
}

/// `‖a - b‖_E / ‖b‖_E`
pub fn relative_energy_difference(problem: &Problem, a: &Fields, b: &Fields) -> f64 {
    let nb = energy_sqr(problem, b, None).sqrt();
    energy_sqr(problem, a, Some(b)).sqrt() / nb.max(f64::MIN_POSITIVE)
}

/// Relative energy-norm error against an exact solution, integrated with a
/// rule well above the polynomial degree.
pub fn relative_energy_error(problem: &Problem, fields: &Fields, exact: &dyn ReferenceField) -> f64 {
    let r = &problem.reference;
    let rule = TriangleRule::with_degree(2 * r.degree + 10);
    let values: Vec<Vec<f64>> = rule.points.iter().map(|x| r.volume_basis.eval(x[0], x[1]).0).collect();
    let (err, norm) = (0..problem.num_elements())
        .into_par_iter()
        .map(|k| {
            let geo = problem.mesh.geometry(k);
            let c = problem.mesh.coeffs(k);
            let region = problem.mesh.regions[k];
            let (wp, wu) = (1.0 / (2.0 * c.rho * c.c * c.c), 0.5 * c.rho);
            let (mut e, mut n) = (0.0, 0.0);
            for (q, &w) in rule.weights.iter().enumerate() {
                let wq = w * geo.det;
                let phi = &values[q];
                let ev = |coef: &[C64]| -> C64 { coef.iter().zip(phi).map(|(a, b)| a * b).sum() };
                let (p, u) = exact.eval(geo.map(rule.points[q]), region);
                let (ph, uxh, uyh) = (ev(&fields[k].p), ev(&fields[k].ux), ev(&fields[k].uy));
                e += wq * (wp * (ph - p).norm_sqr() + wu * ((uxh - u[0]).norm_sqr() + (uyh - u[1]).norm_sqr()));
                n += wq * (wp * p.norm_sqr() + wu * (u[0].norm_sqr() + u[1].norm_sqr()));
            }
            (e, n)
        })
        .collect::<Vec<_>>()
        .iter()
        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    (err / norm.max(f64::MIN_POSITIVE)).sqrt()
}

/// L² projection of an exact solution onto the discrete space.
pub fn project(problem: &Problem, exact: &dyn ReferenceField) -> Fields {
    let r = &problem.reference;
    let rule = TriangleRule::with_degree(2 * r.degree + 10);
    let values: Vec<Vec<f64>> = rule.points.iter().map(|x| r.volume_basis.eval(x[0], x[1]).0).collect();
    let inv = linalg::inverse(&r.volume_mass);
    (0..problem.num_elements())
        .into_par_iter()
        .map(|k| {
            let geo = problem.mesh.geometry(k);
            let region = problem.mesh.regions[k];
            let mut rhs = [linalg::zeros(r.nv), linalg::zeros(r.nv), linalg::zeros(r.nv)];
            for (q, &w) in rule.weights.iter().enumerate() {
                let (p, u) = exact.eval(geo.map(rule.points[q]), region);
                for i in 0..r.nv {
                    let wi = w * values[q][i];
                    rhs[0][i] += p * wi;
                    rhs[1][i] += u[0] * wi;
                    rhs[2][i] += u[1] * wi;
                }
            }
            // reference mass and Jacobian cancel: M_K = det·M_ref, rhs carries no det
            LocalSolution {
                p: linalg::rmatvec(&inv, &rhs[0]),
                ux: linalg::rmatvec(&inv, &rhs[1]),
                uy: linalg::rmatvec(&inv, &rhs[2]),
            }
        })
        .collect()
}
