use std::collections::BTreeMap;
use std::f64::consts::PI;

use chdg::benchmark::{self, Benchmark};
use chdg::fields::relative_energy_difference;
use chdg::hybrid::{
    chdg_operator, dg_oracle, hdg_system, precondition, spectral_radius, BlockLayout, Exchange, LinearOperator,
    SpectralMode,
};
use chdg::linalg;
use chdg::mesh::{generate_disk, generate_unit_square, BoundaryTag, Material};
use chdg::problem::Problem;
use chdg::reference::FluxKind;
use chdg::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FLUXES: [FluxKind; 3] = [FluxKind::Upwind, FluxKind::Sym0, FluxKind::Sym2];

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

fn plane_wave(n: usize, degree: usize, flux: FluxKind, materials: [Material; 2]) -> Problem {
    let mesh = generate_unit_square(n, [BoundaryTag::Robin; 4]).unwrap();
    benchmark::setup(Benchmark::PlaneWave, &materials, mesh, degree, flux).unwrap().0
}

fn homogeneous(omega: f64) -> [Material; 2] {
    [Material { omega, c: 1.0, rho: 1.0 }; 2]
}

fn impedance_jump() -> [Material; 2] {
    [
        Material { omega: 3.0, c: 1.0, rho: 1.0 },
        Material { omega: 3.0, c: 0.5, rho: 1.0 },
    ]
}

/// Mixed D/N/R square with a heterogeneous medium and a volume source.
fn mixed_problem(degree: usize, flux: FluxKind) -> Problem {
    let mesh = generate_unit_square(
        2,
        [BoundaryTag::Dirichlet, BoundaryTag::Neumann, BoundaryTag::Robin, BoundaryTag::Dirichlet],
    )
    .unwrap();
    let rule: BTreeMap<usize, Material> = [(1, impedance_jump()[0]), (2, impedance_jump()[1])].into_iter().collect();
    let mesh = mesh.assign_coefficients(&rule).unwrap();
    let field = chdg::analytic::cavity_reference(chdg::analytic::CavityParams::new([3.0, 6.0], [1.0, 0.5])).unwrap();
    Problem::new(mesh, degree, flux, &field).unwrap()
}

fn check_equivalence(problem: &Problem) {
    let dg = dg_oracle(problem).unwrap();
    let hdg = hdg_system(problem).unwrap();
    let hdg_fields = hdg.reconstruct(&hdg.solve_direct().unwrap());
    let chdg = chdg_operator(problem).unwrap();
    let chdg_fields = chdg.reconstruct(&chdg.solve_direct().unwrap());
    let e1 = relative_energy_difference(problem, &hdg_fields, &dg);
    let e2 = relative_energy_difference(problem, &chdg_fields, &dg);
    let e3 = relative_energy_difference(problem, &chdg_fields, &hdg_fields);
    assert!(e1 < 1e-9 && e2 < 1e-9 && e3 < 1e-9, "{:?}: {e1:e} {e2:e} {e3:e}", problem.flux);
}

#[test]
fn dg_hdg_chdg_agree_on_plane_wave() {
    for flux in FLUXES {
        for p in 1..=3 {
            check_equivalence(&plane_wave(2, p, flux, homogeneous(4.0)));
        }
        check_equivalence(&plane_wave(4, 2, flux, impedance_jump()));
    }
}

#[test]
fn dg_hdg_chdg_agree_with_mixed_conditions_and_source() {
    for flux in FLUXES {
        check_equivalence(&mixed_problem(2, flux));
    }
}

#[test]
fn zero_data_gives_zero_solution() {
    let mesh = generate_unit_square(2, [BoundaryTag::Robin; 4])
        .unwrap()
        .assign_coefficients(&[(1, homogeneous(2.0)[0]), (2, homogeneous(2.0)[0])].into_iter().collect())
        .unwrap();
    let problem = Problem::homogeneous(mesh, 2, FluxKind::Sym0).unwrap();
    assert!(dg_oracle(&problem).unwrap().iter().all(|s| s.stacked().iter().all(|v| v.norm() == 0.0)));
    let hdg = hdg_system(&problem).unwrap();
    assert!(hdg.rhs().iter().all(|v| v.norm() == 0.0));
    let chdg = chdg_operator(&problem).unwrap();
    assert!(chdg.rhs().iter().all(|v| v.norm() == 0.0));
    let zero = linalg::zeros(chdg.dim());
    assert!(chdg.apply_vec(&zero).iter().all(|v| v.norm() == 0.0));
    let fields = chdg.reconstruct(&zero);
    assert!(fields.iter().all(|s| s.stacked().iter().all(|v| v.norm() == 0.0)));
}

#[test]
fn dirichlet_rows_are_identities() {
    let mesh = generate_unit_square(2, [BoundaryTag::Dirichlet; 4]).unwrap();
    let rule = [(1, homogeneous(2.0)[0]), (2, homogeneous(2.0)[0])].into_iter().collect();
    let mesh = mesh.assign_coefficients(&rule).unwrap();
    let field = chdg::analytic::plane_wave_reference(chdg::analytic::PlaneWaveParams::homogeneous(2.0, 1.0)).unwrap();
    let problem = Problem::new(mesh, 2, FluxKind::Sym2, &field).unwrap();
    let hdg = hdg_system(&problem).unwrap();
    let m = hdg.matrix().to_dense();
    let nf = problem.nf();
    for (f, face) in problem.mesh.faces.iter().enumerate() {
        if face.is_interior() {
            continue;
        }
        for a in 0..nf {
            let r = f * nf + a;
            for c in 0..m.ncols() {
                let expected = if c == r { 1.0 } else { 0.0 };
                assert!((m[(r, c)] - expected).norm() < 1e-15);
            }
            assert!((hdg.rhs()[r] - problem.boundary_data[f][a]).norm() < 1e-15);
        }
    }
}

#[test]
fn operators_have_consistent_adjoints() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for flux in FLUXES {
        let problem = mixed_problem(2, flux);
        let chdg = chdg_operator(&problem).unwrap();
        let hdg = hdg_system(&problem).unwrap();
        let ops: Vec<Box<dyn LinearOperator + '_>> = vec![
            Box::new(&chdg),
            Box::new(chdg.pi_s()),
            Box::new(&hdg),
            Box::new(precondition(&chdg, &problem, BlockLayout::Transmission).unwrap()),
            Box::new(precondition(&hdg, &problem, BlockLayout::Trace).unwrap()),
        ];
        for op in &ops {
            let n = op.dim();
            let x = random_vec(&mut rng, n);
            let y = random_vec(&mut rng, n);
            let lhs = linalg::dot(&y, &op.apply_vec(&x));
            let rhs = linalg::dot(&op.apply_adjoint_vec(&y), &x);
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0), "{lhs} vs {rhs}");
        }
    }
}

#[test]
fn exchange_is_an_isometric_involution_without_robin() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mesh = generate_unit_square(
        4,
        [BoundaryTag::Dirichlet, BoundaryTag::Neumann, BoundaryTag::Dirichlet, BoundaryTag::Neumann],
    )
    .unwrap();
    let rule = [(1, impedance_jump()[0]), (2, impedance_jump()[1])].into_iter().collect();
    let mesh = mesh.assign_coefficients(&rule).unwrap();
    for flux in [FluxKind::Sym0, FluxKind::Sym2] {
        let problem = Problem::homogeneous(mesh.clone(), 3, flux).unwrap();
        let chdg = chdg_operator(&problem).unwrap();
        let ex = Exchange::new(&problem);
        for _ in 0..20 {
            let g = random_vec(&mut rng, ex.dim());
            let mut pg = linalg::zeros(g.len());
            let mut ppg = linalg::zeros(g.len());
            ex.apply(&g, &mut pg);
            ex.apply(&pg, &mut ppg);
            assert!(g.iter().zip(&ppg).all(|(a, b)| (a - b).norm() < 1e-13));
            let (n0, n1) = (chdg.a_norm(&g), chdg.a_norm(&pg));
            assert!((n0 - n1).abs() < 1e-13 * n0);
        }
    }
}

#[test]
fn exchange_contracts_on_robin_faces() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for flux in [FluxKind::Sym0, FluxKind::Sym2] {
        let problem = plane_wave(2, 2, flux, impedance_jump());
        let chdg = chdg_operator(&problem).unwrap();
        let nf = problem.nf();
        let mesh = &problem.mesh;
        for k in 0..mesh.num_elements() {
            for j in 0..3 {
                if mesh.faces[mesh.element_faces[k][j]].tag != BoundaryTag::Robin {
                    continue;
                }
                let mut g = linalg::zeros(chdg.dim());
                let off = (3 * k + j) * nf;
                g[off..off + nf].copy_from_slice(&random_vec(&mut rng, nf));
                let mut pg = linalg::zeros(g.len());
                chdg.exchange().apply(&g, &mut pg);
                assert!(chdg.a_norm(&pg) < chdg.a_norm(&g));
            }
        }
    }
}

#[test]
fn pi_s_is_a_strict_contraction_for_symmetric_fluxes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for flux in [FluxKind::Sym0, FluxKind::Sym2] {
        for problem in [plane_wave(4, 3, flux, impedance_jump()), mixed_problem(2, flux)] {
            let chdg = chdg_operator(&problem).unwrap();
            for _ in 0..100 {
                let g = random_vec(&mut rng, chdg.dim());
                let ng = chdg.a_norm(&g);
                let out = chdg.pi_s().apply_vec(&g);
                assert!(chdg.a_norm(&out) < ng * (1.0 - 1e-14));
            }
        }
    }
}

#[test]
fn dense_spectra() {
    let sym0 = plane_wave(2, 2, FluxKind::Sym0, homogeneous(4.0));
    let chdg = chdg_operator(&sym0).unwrap();
    let rho = spectral_radius(&chdg.pi_s(), SpectralMode::Dense).unwrap();
    assert!(rho.radius < 1.0);

    // Π alone without Robin faces: every eigenvalue on the unit circle
    let mesh = generate_unit_square(2, [BoundaryTag::Dirichlet, BoundaryTag::Neumann, BoundaryTag::Dirichlet, BoundaryTag::Neumann])
        .unwrap()
        .assign_coefficients(&[(1, homogeneous(2.0)[0]), (2, homogeneous(2.0)[0])].into_iter().collect())
        .unwrap();
    let problem = Problem::homogeneous(mesh, 1, FluxKind::Sym0).unwrap();
    let ex = Exchange::new(&problem);
    let dense = chdg::hybrid::DenseOperator(faer::Mat::from_fn(ex.dim(), ex.dim(), |i, j| {
        let mut e = linalg::zeros(ex.dim());
        e[j] = C64::new(1.0, 0.0);
        let mut out = linalg::zeros(ex.dim());
        ex.apply(&e, &mut out);
        out[i]
    }));
    let est = spectral_radius(&dense, SpectralMode::Dense).unwrap();
    assert!(est.eigenvalues.iter().all(|l| (l.norm() - 1.0).abs() < 1e-12));
}

#[test]
fn upwind_exceeds_unit_radius_with_impedance_jump() {
    let problem = plane_wave(24, 3, FluxKind::Upwind, [
        Material { omega: 15.0 * PI, c: 1.0, rho: 1.0 },
        Material { omega: 15.0 * PI, c: 0.5, rho: 1.0 },
    ]);
    let chdg = chdg_operator(&problem).unwrap();
    let rho = spectral_radius(&chdg.pi_s(), SpectralMode::Power { max_iter: 3000, tol: 1e-6, seed: 2 }).unwrap();
    assert!(rho.radius > 1.0, "{}", rho.radius);
}

#[test]
fn upwind_matches_sym0_under_constant_impedance() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let upw = plane_wave(4, 3, FluxKind::Upwind, [
        Material { omega: 5.0, c: 1.0, rho: 1.0 },
        Material { omega: 5.0, c: 0.5, rho: 2.0 },
    ]);
    let sym = upw.with_flux(FluxKind::Sym0).unwrap();
    let a = chdg_operator(&upw).unwrap();
    let b = chdg_operator(&sym).unwrap();
    for _ in 0..10 {
        let g = random_vec(&mut rng, a.dim());
        let (ya, yb) = (a.apply_vec(&g), b.apply_vec(&g));
        assert!(ya.iter().zip(&yb).all(|(x, y)| (x - y).norm() < 1e-12));
    }
    assert!(a.rhs().iter().zip(b.rhs()).all(|(x, y)| (x - y).norm() < 1e-12));
}

#[test]
fn preconditioning_is_a_similarity_and_an_l2_isometry() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let problem = plane_wave(2, 3, FluxKind::Sym2, impedance_jump());
    let chdg = chdg_operator(&problem).unwrap();
    let pre = precondition(&chdg, &problem, BlockLayout::Transmission).unwrap();
    let g = random_vec(&mut rng, chdg.dim());
    let l2: f64 = (0..problem.num_elements())
        .flat_map(|k| (0..3).map(move |j| (k, j)))
        .map(|(k, j)| {
            let off = (3 * k + j) * problem.nf();
            problem.face_op(k, j).inner(&g[off..off + problem.nf()], &g[off..off + problem.nf()]).re
        })
        .sum::<f64>()
        .sqrt();
    assert!((linalg::norm(&pre.to_preconditioned(&g)) - l2).abs() < 1e-12 * l2);
    let back = pre.from_preconditioned(&pre.to_preconditioned(&g));
    assert!(back.iter().zip(&g).all(|(a, b)| (a - b).norm() < 1e-12));

    let e0 = spectral_radius(&chdg, SpectralMode::Dense).unwrap().eigenvalues;
    let e1 = spectral_radius(&pre, SpectralMode::Dense).unwrap().eigenvalues;
    let mut used = vec![false; e1.len()];
    for l in &e0 {
        let (i, d) = e1
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, m)| (i, (m - l).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        used[i] = true;
        assert!(d < 1e-10, "{l} off by {d:e}");
    }
}

#[test]
fn power_mode_is_a_lower_estimate() {
    let problem = plane_wave(2, 2, FluxKind::Sym0, homogeneous(4.0));
    let chdg = chdg_operator(&problem).unwrap();
    let dense = spectral_radius(&chdg.pi_s(), SpectralMode::Dense).unwrap().radius;
    let power = spectral_radius(&chdg.pi_s(), SpectralMode::Power { max_iter: 5000, tol: 1e-10, seed: 1 }).unwrap();
    assert!(power.radius <= dense * (1.0 + 1e-6) + 1e-12);
    assert!(power.radius > 0.5 * dense);
}

#[test]
fn disk_problem_builds_for_all_fluxes() {
    for flux in FLUXES {
        let mesh = generate_disk(0.2, 0.25, 0.5, BoundaryTag::Dirichlet).unwrap();
        let (problem, _) =
            benchmark::setup(Benchmark::Cavity, &[Material { omega: 16.5, c: 1.0, rho: 1.0 }; 2], mesh, 2, flux).unwrap();
        check_equivalence(&problem);
    }
}
