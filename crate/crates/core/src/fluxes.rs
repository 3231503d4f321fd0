//! Face-local flux algebra on canonical edge-coefficient blocks.
//!
//! Every flux in both families is linear in the two transmission variables:
//! `g⊕ = out_p·p + out_u·(n·u)`, `p̂ = hat_p_out·g⊕ + hat_p_in·g⊖` and
//! `n·û = hat_u_out·g⊕ + hat_u_in·g⊖`. [`FluxMatrices`] holds these maps so
//! assembly and the pointwise functions below share one definition.

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::{self, rmatvec};
use crate::mesh::BoundaryTag;
use crate::reference::FaceOperator;
use crate::C64;

/// Traces of `p_K` and `n_{K,F}·u_K` on a face.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceState {
    pub p: Vec<C64>,
    pub un: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxPair {
    pub p_hat: Vec<C64>,
    pub un_hat: Vec<C64>,
}

/// Impedances seen from one side of a face. On boundary faces both are `η_K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideCoeffs {
    pub eta_own: f64,
    pub eta_other: f64,
}

impl SideCoeffs {
    pub fn boundary(eta: f64) -> Self {
        SideCoeffs {
            eta_own: eta,
            eta_other: eta,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FluxMatrices {
    pub out_p: Mat<f64>,
    pub out_u: Mat<f64>,
    pub hat_p_out: Mat<f64>,
    pub hat_p_in: Mat<f64>,
    pub hat_u_out: Mat<f64>,
    pub hat_u_in: Mat<f64>,
}

pub fn flux_matrices(side: SideCoeffs, op: &FaceOperator) -> FluxMatrices {
    let id = linalg::identity(op.nf());
    match (&op.a, &op.a_inv) {
        (Some(a), Some(a_inv)) => FluxMatrices {
            out_p: a_inv.clone(),
            out_u: id.clone(),
            hat_p_out: a * 0.5,
            hat_p_in: a * 0.5,
            hat_u_out: &id * 0.5,
            hat_u_in: &id * -0.5,
        },
        _ => {
            let (e, e2) = (side.eta_own, side.eta_other);
            let s = 1.0 / (e + e2);
            FluxMatrices {
                out_p: id.clone(),
                out_u: &id * e,
                hat_p_out: &id * (e2 * s),
                hat_p_in: &id * (e * s),
                hat_u_out: &id * s,
                hat_u_in: &id * -s,
            }
        }
    }
}

/// Outgoing transmission variable: `p + η n·u` (upwind) or `A⁻¹p + n·u`.
pub fn outgoing(trace: &TraceState, side: SideCoeffs, op: &FaceOperator) -> Vec<C64> {
    match &op.a_inv {
        Some(a_inv) => {
            let mut g = rmatvec(a_inv, &trace.p);
            linalg::axpy(C64::new(1.0, 0.0), &trace.un, &mut g);
            g
        }
        None => {
            let mut g = trace.p.clone();
            linalg::axpy(C64::new(side.eta_own, 0.0), &trace.un, &mut g);
            g
        }
    }
}

/// Incoming transmission variable on a boundary face from the outgoing one
/// and the projected boundary datum. Robin faces need the closure attached.
pub fn incoming_boundary(
    g_out: &[C64],
    tag: BoundaryTag,
    source: &[C64],
    side: SideCoeffs,
    op: &FaceOperator,
) -> Result<Vec<C64>> {
    let eta = side.eta_own;
    let symmetric = op.a.is_some();
    let g = match tag {
        BoundaryTag::Interior => {
            return Err(Error::InvalidInput("incoming_boundary called on an interior face".into()))
        }
        BoundaryTag::Dirichlet => {
            let mut g: Vec<C64> = g_out.iter().map(|x| -x).collect();
            let s = if symmetric { op.apply_a_inv(source) } else { source.to_vec() };
            linalg::axpy(C64::new(2.0, 0.0), &s, &mut g);
            g
        }
        BoundaryTag::Neumann => {
            let mut g = g_out.to_vec();
            let scale = if symmetric { -2.0 } else { -2.0 * eta };
            linalg::axpy(C64::new(scale, 0.0), source, &mut g);
            g
        }
        BoundaryTag::Robin => {
            if !symmetric {
                return Ok(source.to_vec());
            }
            let robin = op
                .robin
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("Robin closure missing on face operator".into()))?;
            let mut g = rmatvec(&robin.b_plus_inv_b_minus, g_out);
            linalg::axpy(C64::new(2.0 / eta, 0.0), &rmatvec(&robin.b_plus_inv, source), &mut g);
            g
        }
    };
    Ok(g)
}

pub fn numerical_flux(g_out: &[C64], g_in: &[C64], side: SideCoeffs, op: &FaceOperator) -> FluxPair {
    let m = flux_matrices(side, op);
    let mut p_hat = rmatvec(&m.hat_p_out, g_out);
    linalg::axpy(C64::new(1.0, 0.0), &rmatvec(&m.hat_p_in, g_in), &mut p_hat);
    let mut un_hat = rmatvec(&m.hat_u_out, g_out);
    linalg::axpy(C64::new(1.0, 0.0), &rmatvec(&m.hat_u_in, g_in), &mut un_hat);
    FluxPair { p_hat, un_hat }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{build_face_operator, build_reference, FluxKind};
    use proptest::prelude::*;

    fn op(kind: FluxKind, eta: f64, eta2: f64) -> FaceOperator {
        let r = build_reference(3).unwrap();
        build_face_operator(kind, eta, eta2, 9.0, 13.0, &r, 0.3)
            .unwrap()
            .with_robin_closure(eta)
    }

    fn block(v: &[(f64, f64)]) -> Vec<C64> {
        v.iter().map(|&(a, b)| C64::new(a, b)).collect()
    }

    fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol * (1.0 + y.norm()))
    }

    fn cblock() -> impl Strategy<Value = Vec<C64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4).prop_map(|v| block(&v))
    }

    #[test]
    fn outgoing_examples() {
        let e1 = block(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let t = TraceState { p: e1.clone(), un: e1.clone() };
        let up = outgoing(&t, SideCoeffs::boundary(1.0), &op(FluxKind::Upwind, 1.0, 1.0));
        assert_eq!(up[0], C64::new(2.0, 0.0));
        let s0 = outgoing(&t, SideCoeffs::boundary(1.0), &op(FluxKind::Sym0, 1.0, 1.0));
        assert!(close(&up, &s0, 1e-15));
        // constant trace: Sym2 returns p/μ + n·u
        let o = op(FluxKind::Sym2, 2.0, 2.0);
        let c = block(&[(1.0, 0.5), (1.0, 0.5), (0.0, 0.0), (0.0, 0.0)]);
        let t = TraceState { p: c.clone(), un: c.clone() };
        let g = outgoing(&t, SideCoeffs::boundary(2.0), &o);
        let expect: Vec<C64> = c.iter().map(|x| x / o.mu + x).collect();
        assert!(close(&g, &expect, 1e-12));
    }

    #[test]
    fn boundary_examples() {
        let g = block(&[(0.3, 1.0), (-2.0, 0.1), (0.5, 0.5), (1.0, 0.0)]);
        let zero = vec![C64::new(0.0, 0.0); 4];
        let neg: Vec<C64> = g.iter().map(|x| -x).collect();
        for kind in [FluxKind::Upwind, FluxKind::Sym0, FluxKind::Sym2] {
            let o = op(kind, 1.3, 1.3);
            let s = SideCoeffs::boundary(1.3);
            assert!(close(&incoming_boundary(&g, BoundaryTag::Dirichlet, &zero, s, &o).unwrap(), &neg, 1e-15));
            assert!(close(&incoming_boundary(&g, BoundaryTag::Neumann, &zero, s, &o).unwrap(), &g, 1e-15));
            assert!(incoming_boundary(&g, BoundaryTag::Interior, &zero, s, &o).is_err());
        }
        let o = op(FluxKind::Upwind, 1.3, 1.3);
        let r = incoming_boundary(&g, BoundaryTag::Robin, &zero, SideCoeffs::boundary(1.3), &o).unwrap();
        assert!(linalg::norm(&r) == 0.0);
    }

    #[test]
    fn equal_incoming_gives_zero_normal_flux() {
        let g = block(&[(0.3, 1.0), (-2.0, 0.1), (0.5, 0.5), (1.0, 0.0)]);
        let o = op(FluxKind::Sym2, 1.0, 2.0);
        let f = numerical_flux(&g, &g, SideCoeffs { eta_own: 1.0, eta_other: 2.0 }, &o);
        assert!(linalg::norm(&f.un_hat) < 1e-15);
        assert!(close(&f.p_hat, &o.apply_a(&g), 1e-14));
    }

    proptest! {
        #[test]
        fn upwind_relation(p in cblock(), un in cblock(), gin in cblock(), e1 in 0.2f64..3.0, e2 in 0.2f64..3.0) {
            let o = op(FluxKind::Upwind, e1, e2);
            let s = SideCoeffs { eta_own: e1, eta_other: e2 };
            let g = outgoing(&TraceState { p: p.clone(), un: un.clone() }, s, &o);
            let f = numerical_flux(&g, &gin, s, &o);
            let lhs: Vec<C64> = f.p_hat.iter().zip(&f.un_hat).map(|(a, b)| a + b * e1).collect();
            let rhs: Vec<C64> = p.iter().zip(&un).map(|(a, b)| a + b * e1).collect();
            prop_assert!(close(&lhs, &rhs, 1e-12));
        }

        #[test]
        fn symmetric_relation(p in cblock(), un in cblock(), gin in cblock(), e1 in 0.2f64..3.0, e2 in 0.2f64..3.0) {
            for kind in [FluxKind::Sym0, FluxKind::Sym2] {
                let o = op(kind, e1, e2);
                let s = SideCoeffs { eta_own: e1, eta_other: e2 };
                let g = outgoing(&TraceState { p: p.clone(), un: un.clone() }, s, &o);
                let f = numerical_flux(&g, &gin, s, &o);
                let a_un_hat = o.apply_a(&f.un_hat);
                let a_un = o.apply_a(&un);
                let lhs: Vec<C64> = f.p_hat.iter().zip(&a_un_hat).map(|(a, b)| a + b).collect();
                let rhs: Vec<C64> = p.iter().zip(&a_un).map(|(a, b)| a + b).collect();
                prop_assert!(close(&lhs, &rhs, 1e-12));
            }
        }

        #[test]
        fn consistency_for_continuous_traces(p in cblock(), un in cblock(), eta in 0.2f64..3.0) {
            // neighbor sees the same p and the opposite normal
            let s = SideCoeffs { eta_own: eta, eta_other: eta };
            for kind in [FluxKind::Upwind, FluxKind::Sym0] {
                let o = op(kind, eta, eta);
                let mine = outgoing(&TraceState { p: p.clone(), un: un.clone() }, s, &o);
                let neg: Vec<C64> = un.iter().map(|x| -x).collect();
                let theirs = outgoing(&TraceState { p: p.clone(), un: neg }, s, &o);
                let f = numerical_flux(&mine, &theirs, s, &o);
                prop_assert!(close(&f.p_hat, &p, 1e-12));
                prop_assert!(close(&f.un_hat, &un, 1e-12));
            }
        }

        #[test]
        fn upwind_equals_sym0_at_matching_impedance(p in cblock(), un in cblock(), gin in cblock(), src in cblock(), eta in 0.2f64..3.0) {
            let s = SideCoeffs::boundary(eta);
            let (ou, os) = (op(FluxKind::Upwind, eta, eta), op(FluxKind::Sym0, eta, eta));
            let t = TraceState { p, un };
            // g is scaled by η between the families; compare the fluxes
            let gu = outgoing(&t, s, &ou);
            let gs = outgoing(&t, s, &os);
            let gin_s: Vec<C64> = gin.iter().map(|x| x / eta).collect();
            let fu = numerical_flux(&gu, &gin, s, &ou);
            let fs = numerical_flux(&gs, &gin_s, s, &os);
            prop_assert!(close(&fu.p_hat, &fs.p_hat, 1e-12));
            prop_assert!(close(&fu.un_hat, &fs.un_hat, 1e-12));
            for tag in [BoundaryTag::Dirichlet, BoundaryTag::Neumann, BoundaryTag::Robin] {
                let iu = incoming_boundary(&gu, tag, &src, s, &ou).unwrap();
                let is = incoming_boundary(&gs, tag, &src, s, &os).unwrap();
                let fu = numerical_flux(&gu, &iu, s, &ou);
                let fs = numerical_flux(&gs, &is, s, &os);
                prop_assert!(close(&fu.p_hat, &fs.p_hat, 1e-12));
                prop_assert!(close(&fu.un_hat, &fs.un_hat, 1e-12));
            }
        }
    }
}
