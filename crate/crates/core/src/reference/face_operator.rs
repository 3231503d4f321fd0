//! Per-face operators of the numerical fluxes.

use faer::Mat;

use super::ReferenceElement;
use crate::error::{Error, Result};
use crate::linalg::{self, rmatvec};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FluxKind {
    Upwind,
    Sym0,
    Sym2,
}

impl FluxKind {
    pub fn is_symmetric(self) -> bool {
        !matches!(self, FluxKind::Upwind)
    }

    pub fn name(self) -> &'static str {
        match self {
            FluxKind::Upwind => "upw",
            FluxKind::Sym0 => "sym0",
            FluxKind::Sym2 => "sym2",
        }
    }
}

impl std::str::FromStr for FluxKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upw" | "upwind" => Ok(FluxKind::Upwind),
            "sym0" => Ok(FluxKind::Sym0),
            "sym2" => Ok(FluxKind::Sym2),
            _ => Err(Error::InvalidInput(format!("unknown flux '{s}'"))),
        }
    }
}

/// Robin closure `g⊖ = B₊⁻¹(B₋ g⊕ + ...)` with `B± = I ± A/η`.
#[derive(Debug, Clone)]
pub struct RobinClosure {
    pub b_plus_inv: Mat<f64>,
    pub b_plus_inv_b_minus: Mat<f64>,
}

#[derive(Debug, Clone)]
pub struct FaceOperator {
    pub kind: FluxKind,
    pub mu: f64,
    pub kappa_f: f64,
    pub length: f64,
    /// Physical face mass matrix `length · M_ref`.
    pub mass: Mat<f64>,
    /// Physical face stiffness `M_ref'' / length` (natural end conditions).
    pub stiffness: Mat<f64>,
    pub a: Option<Mat<f64>>,
    pub a_inv: Option<Mat<f64>>,
    pub robin: Option<RobinClosure>,
}

/// Builds the face operator. On boundary faces pass the owner's values twice.
pub fn build_face_operator(
    kind: FluxKind,
    eta_k: f64,
    eta_kp: f64,
    kappa_k: f64,
    kappa_kp: f64,
    reference: &ReferenceElement,
    edge_length: f64,
) -> Result<FaceOperator> {
    if !(edge_length > 0.0) {
        return Err(Error::FaceOperator(format!("edge length {edge_length}")));
    }
    let mu = (eta_k * eta_kp).sqrt();
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::FaceOperator(format!("mu_F = {mu} is not positive")));
    }
    let kappa_f = (kappa_k * kappa_kp).sqrt();
    let nf = reference.nf;
    let mass = &reference.edge_mass * edge_length;
    let stiffness = &reference.edge_stiffness * (1.0 / edge_length);
    let (a, a_inv) = match kind {
        FluxKind::Upwind => (None, None),
        FluxKind::Sym0 => (
            Some(linalg::identity(nf) * mu),
            Some(linalg::identity(nf) * (1.0 / mu)),
        ),
        FluxKind::Sym2 => {
            if !(kappa_f > 0.0) || !kappa_f.is_finite() {
                return Err(Error::FaceOperator(format!("kappa_F = {kappa_f} is not positive")));
            }
            let shifted = &mass + &stiffness * (1.0 / (2.0 * kappa_f * kappa_f));
            let a = linalg::inverse(&shifted) * &mass * mu;
            // A⁻¹ = μ⁻¹ M⁻¹ (M + S/(2κ²))
            let a_inv = linalg::inverse(&mass) * &shifted * (1.0 / mu);
            (Some(a), Some(a_inv))
        }
    };
    Ok(FaceOperator {
        kind,
        mu,
        kappa_f,
        length: edge_length,
        mass,
        stiffness,
        a,
        a_inv,
        robin: None,
    })
}

impl FaceOperator {
    /// Attaches the Robin closure for a boundary face owned by an element of impedance `eta`.
    pub fn with_robin_closure(mut self, eta: f64) -> Self {
        let nf = self.mass.nrows();
        let closure = match &self.a {
            None => RobinClosure {
                b_plus_inv: linalg::identity(nf) * 0.5,
                b_plus_inv_b_minus: Mat::zeros(nf, nf),
            },
            Some(a) => {
                let id = linalg::identity(nf);
                let b_plus = &id + a * (1.0 / eta);
                let b_minus = &id - a * (1.0 / eta);
                let b_plus_inv = linalg::inverse(&b_plus);
                let b_plus_inv_b_minus = &b_plus_inv * &b_minus;
                RobinClosure {
                    b_plus_inv,
                    b_plus_inv_b_minus,
                }
            }
        };
        self.robin = Some(closure);
        self
    }

    pub fn nf(&self) -> usize {
        self.mass.nrows()
    }

    pub fn apply_a(&self, x: &[C64]) -> Vec<C64> {
        match &self.a {
            Some(a) => rmatvec(a, x),
            None => x.to_vec(),
        }
    }

    pub fn apply_a_inv(&self, x: &[C64]) -> Vec<C64> {
        match &self.a_inv {
            Some(a) => rmatvec(a, x),
            None => x.to_vec(),
        }
    }

    /// `⟨x, y⟩_F = y^H M_F x`
    pub fn inner(&self, x: &[C64], y: &[C64]) -> C64 {
        linalg::dot(y, &rmatvec(&self.mass, x))
    }

    /// `⟨A x, x⟩_F`, the squared A-norm (plain L² norm for upwind).
    pub fn a_norm_sqr(&self, x: &[C64]) -> f64 {
        self.inner(&self.apply_a(x), x).re
    }

    /// `M_F A`, the Hermitian matrix behind the A-norm.
    pub fn mass_a(&self) -> Mat<f64> {
        match &self.a {
            Some(a) => &self.mass * a,
            None => self.mass.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::build_reference;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_block(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        (0..n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn sym0_is_scaled_identity() {
        let r = build_reference(3).unwrap();
        let op = build_face_operator(FluxKind::Sym0, 1.0, 1.0, 3.0, 3.0, &r, 0.7).unwrap();
        assert!(linalg::max_abs_diff(op.a.as_ref().unwrap(), &linalg::identity(4)) < 1e-15);
        let op = build_face_operator(FluxKind::Sym0, 2.0, 0.5, 3.0, 3.0, &r, 0.7).unwrap();
        assert!((op.mu - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sym2_fixes_constants() {
        let r = build_reference(1).unwrap();
        let op = build_face_operator(FluxKind::Sym2, 1.0, 1.0, 1.0, 1.0, &r, 1.0).unwrap();
        let one = vec![C64::new(1.0, 0.0); 2];
        let out = op.apply_a(&one);
        for v in out {
            assert!((v - 1.0).norm() < 1e-13);
        }
        let r = build_reference(3).unwrap();
        let op = build_face_operator(FluxKind::Sym2, 2.0, 3.0, 5.0, 7.0, &r, 0.3).unwrap();
        let one = vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        for (v, w) in op.apply_a(&one).iter().zip(&one) {
            assert!((v - w * op.mu).norm() < 1e-12);
        }
    }

    #[test]
    fn sym2_mass_a_is_hpd() {
        let r = build_reference(3).unwrap();
        let op = build_face_operator(FluxKind::Sym2, 1.0, 1.5, 10.0, 15.0, &r, 0.05).unwrap();
        let ma = op.mass_a();
        let asym = linalg::max_abs_diff(&ma, &ma.transpose().to_owned());
        assert!(asym < 1e-12 * ma.norm_max());
        let eig = ma.eigenvalues().unwrap();
        for l in eig {
            assert!(l.re > 0.0 && l.im.abs() < 1e-12);
        }
        let prod = op.a.as_ref().unwrap() * op.a_inv.as_ref().unwrap();
        assert!(linalg::max_abs_diff(&prod, &linalg::identity(4)) < 1e-12);
    }

    #[test]
    fn self_adjoint_and_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = build_reference(4).unwrap();
        for kind in [FluxKind::Sym0, FluxKind::Sym2] {
            let op = build_face_operator(kind, 1.0, 2.0, 8.0, 20.0, &r, 0.1).unwrap();
            for _ in 0..100 {
                let u = random_block(&mut rng, 5);
                let v = random_block(&mut rng, 5);
                let auv = op.inner(&op.apply_a(&u), &v);
                let avu = op.inner(&op.apply_a(&v), &u);
                assert!((auv - avu.conj()).norm() < 1e-12 * (1.0 + auv.norm()));
                assert!(op.a_norm_sqr(&u) > 0.0);
            }
        }
    }

    #[test]
    fn sym2_tends_to_sym0_for_large_kappa() {
        let r = build_reference(3).unwrap();
        let op = build_face_operator(FluxKind::Sym2, 2.0, 2.0, 1e8, 1e8, &r, 0.2).unwrap();
        let d = linalg::max_abs_diff(op.a.as_ref().unwrap(), &(linalg::identity(4) * 2.0));
        assert!(d < 1e-10);
    }

    #[test]
    fn rejects_non_positive_mu() {
        let r = build_reference(2).unwrap();
        assert!(build_face_operator(FluxKind::Sym0, -1.0, 1.0, 1.0, 1.0, &r, 1.0).is_err());
        assert!(build_face_operator(FluxKind::Sym0, 0.0, 1.0, 1.0, 1.0, &r, 1.0).is_err());
    }

    #[test]
    fn upwind_robin_closure() {
        let r = build_reference(2).unwrap();
        let op = build_face_operator(FluxKind::Upwind, 1.0, 1.0, 1.0, 1.0, &r, 1.0)
            .unwrap()
            .with_robin_closure(1.0);
        let rc = op.robin.unwrap();
        assert!(rc.b_plus_inv_b_minus.norm_max() == 0.0);
        assert!(linalg::max_abs_diff(&rc.b_plus_inv, &(linalg::identity(3) * 0.5)) < 1e-16);
    }
}
