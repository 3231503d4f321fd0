use faer::Mat;

use crate::error::Result;
use crate::fields::Fields;
use crate::linalg::{self, SparseMatrix};
use crate::local::{assemble_volume_forms, face_traces, LocalSolution};
use crate::mesh::BoundaryTag;
use crate::problem::Problem;
use crate::C64;

/// Explicit face flux `x̂ = a P + b P' + c U + d W' + e s` for one quantity,
/// where primes are the neighbor's traces (`W' = n_{K'}·u_{K'}`).
struct Linear {
    own_p: Mat<f64>,
    own_u: Mat<f64>,
    nb_p: Mat<f64>,
    nb_u: Mat<f64>,
    src: Mat<f64>,
}

/// `(p̂, n·û)` as explicit functions of both sides' traces.
fn explicit_fluxes(problem: &Problem, k: usize, j: usize) -> (Linear, Linear) {
    let nf = problem.nf();
    let id = linalg::identity(nf);
    let z = Mat::<f64>::zeros(nf, nf);
    let mesh = &problem.mesh;
    let tag = mesh.faces[mesh.element_faces[k][j]].tag;
    let op = problem.face_op(k, j);
    let side = problem.side_coeffs(k, j);
    let eta = side.eta_own;
    let (a, a_inv) = match (&op.a, &op.a_inv) {
        (Some(a), Some(ai)) => (a.clone(), ai.clone()),
        _ => (&id * eta, &id * (1.0 / eta)),
    };
    let lin = |own_p: Mat<f64>, own_u: Mat<f64>, nb_p: Mat<f64>, nb_u: Mat<f64>, src: Mat<f64>| Linear {
        own_p,
        own_u,
        nb_p,
        nb_u,
        src,
    };
    match tag {
        BoundaryTag::Interior => {
            if op.a.is_some() {
                (
                    lin(&id * 0.5, &a * 0.5, &id * 0.5, &a * 0.5, z.clone()),
                    lin(&a_inv * 0.5, &id * 0.5, &a_inv * -0.5, &id * -0.5, z),
                )
            } else {
                let (e, e2) = (side.eta_own, side.eta_other);
                let s = 1.0 / (e + e2);
                (
                    lin(&id * (e2 * s), &id * (e * e2 * s), &id * (e * s), &id * (e * e2 * s), z.clone()),
                    lin(&id * s, &id * (e * s), &id * -s, &id * (-e2 * s), z),
                )
            }
        }
        BoundaryTag::Dirichlet => (
            lin(z.clone(), z.clone(), z.clone(), z.clone(), id.clone()),
            lin(a_inv.clone(), id, z.clone(), z, &a_inv * -1.0),
        ),
        BoundaryTag::Neumann => (
            lin(id.clone(), a.clone(), z.clone(), z.clone(), &a * -1.0),
            lin(z.clone(), z.clone(), z.clone(), z, id),
        ),
        BoundaryTag::Robin => {
            let bpi = op.robin.as_ref().expect("Robin faces carry a closure").b_plus_inv.clone();
            let bpi_a = &bpi * &a;
            (
                lin(bpi.clone(), bpi_a.clone(), z.clone(), z.clone(), &bpi_a * (1.0 / eta)),
                lin(&bpi * (1.0 / eta), &bpi_a * (1.0 / eta), z.clone(), z, &bpi * (-1.0 / eta)),
            )
        }
    }
}

/// Monolithic DG solve with the chosen flux family; small meshes only.
///
/// The element equations are those of the local problems with the fluxes
/// written in terms of both sides' traces, so no hybrid unknown appears.
pub fn dg_oracle(problem: &Problem) -> Result<Fields> {
    let mesh = &problem.mesh;
    let reference = &problem.reference;
    let nv = problem.nv();
    let n3 = 3 * nv;
    let dim = n3 * mesh.num_elements();
    let mut trip: Vec<(usize, usize, C64)> = Vec::new();
    let mut rhs = linalg::zeros(dim);
    let push = |trip: &mut Vec<(usize, usize, C64)>, m: &Mat<f64>, r0: usize, c0: usize| {
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if m[(i, j)] != 0.0 {
                    trip.push((r0 + i, c0 + j, C64::new(m[(i, j)], 0.0)));
                }
            }
        }
    };

    for k in 0..mesh.num_elements() {
        let c = mesh.coeffs(k);
        let vol = assemble_volume_forms(mesh, k, reference)?;
        let r0 = k * n3;
        let iw_p = C64::new(0.0, -c.kappa / c.eta);
        let iw_u = C64::new(0.0, -c.kappa * c.eta);
        for i in 0..nv {
            for j in 0..nv {
                let m = vol.mass[(i, j)];
                trip.push((r0 + i, r0 + j, iw_p * m));
                trip.push((r0 + nv + i, r0 + nv + j, iw_u * m));
                trip.push((r0 + 2 * nv + i, r0 + 2 * nv + j, iw_u * m));
            }
            rhs[r0 + i] = problem.sources[k] * vol.load[i];
        }
        push(&mut trip, &(&vol.gx * -1.0), r0, r0 + nv);
        push(&mut trip, &(&vol.gy * -1.0), r0, r0 + 2 * nv);
        push(&mut trip, &(&vol.gx * -1.0), r0 + nv, r0);
        push(&mut trip, &(&vol.gy * -1.0), r0 + 2 * nv, r0);

        let traces = face_traces(mesh, k, reference);
        for (j, ft) in traces.iter().enumerate() {
            let op = problem.face_op(k, j);
            let (ph, uh) = explicit_fluxes(problem, k, j);
            let pm = ft.p_map(nv);
            let um = ft.un_map(nv);
            // test side: Pᵀ M n·û + Uᵀ M p̂
            let tp = pm.transpose() * &op.mass;
            let tu = um.transpose() * &op.mass;
            let own = &tp * (&uh.own_p * &pm + &uh.own_u * &um) + &tu * (&ph.own_p * &pm + &ph.own_u * &um);
            push(&mut trip, &own, r0, r0);
            match mesh.across(k, j) {
                Some(other) => {
                    let nt = &face_traces(mesh, other.element, reference)[other.local];
                    let npm = nt.p_map(nv);
                    let num = nt.un_map(nv);
                    let nb = &tp * (&uh.nb_p * &npm + &uh.nb_u * &num) + &tu * (&ph.nb_p * &npm + &ph.nb_u * &num);
                    push(&mut trip, &nb, r0, other.element * n3);
                }
                None => {
                    let s = &problem.boundary_data[ft.face];
                    let src = &tp * &uh.src + &tu * &ph.src;
                    let v = linalg::rmatvec(&src, s);
                    for (i, x) in v.into_iter().enumerate() {
                        rhs[r0 + i] -= x;
                    }
                }
            }
        }
    }
    let x = SparseMatrix::from_triplets(dim, dim, trip).solve(&rhs)?;
    Ok((0..mesh.num_elements())
        .map(|k| LocalSolution::from_stacked(&x[k * n3..(k + 1) * n3], nv))
        .collect())
}
