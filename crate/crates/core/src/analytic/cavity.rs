//! Radial cavity solution driven by the constant source `f = -1/(iκη)`.

use faer::prelude::*;
use faer::Mat;

use super::bessel::bessel_pair;
use super::ReferenceField;
use crate::error::{Error, Result};
use crate::mesh::{BoundaryTag, ElementCoeffs};
use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct CavityParams {
    pub kappa: [f64; 2],
    pub eta: [f64; 2],
    pub r1: f64,
    pub r2: f64,
}

impl CavityParams {
    pub fn new(kappa: [f64; 2], eta: [f64; 2]) -> Self {
        CavityParams {
            kappa,
            eta,
            r1: 0.25,
            r2: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CavityReference {
    pub params: CavityParams,
    pub a1: f64,
    pub a2: f64,
    pub b2: f64,
    /// 2-norm condition number of the coefficient system.
    pub condition: f64,
}

const RESONANCE_CONDITION: f64 = 1e12;

/// Solves for `A₁, A₂, B₂` from continuity of `p` and of `(κη)⁻¹ ∂_r p` at `R₁`
/// and `p(R₂) = 0`.
pub fn cavity_reference(params: CavityParams) -> Result<CavityReference> {
    let CavityParams { kappa, eta, r1, r2 } = params;
    if kappa.iter().chain(&eta).any(|&v| !(v > 0.0) || !v.is_finite()) || !(0.0 < r1 && r1 < r2) {
        return Err(Error::Domain("cavity needs positive kappa, eta and 0 < R1 < R2".into()));
    }
    let outer = bessel_pair(kappa[1] * r2);
    let inner1 = bessel_pair(kappa[0] * r1);
    let inner2 = bessel_pair(kappa[1] * r1);
    let m = Mat::from_fn(3, 3, |i, j| match (i, j) {
        (0, 0) => 0.0,
        (0, 1) => outer.j[0],
        (0, 2) => outer.y[0],
        (1, 0) => inner1.j[0],
        (1, 1) => -inner2.j[0],
        (1, 2) => -inner2.y[0],
        (2, 0) => inner1.j[1] / eta[0],
        (2, 1) => -inner2.j[1] / eta[1],
        _ => -inner2.y[1] / eta[1],
    });
    let s = m.singular_values().map_err(|_| Error::Singular { what: "cavity" })?;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= RESONANCE_CONDITION) {
        return Err(Error::Resonance(condition));
    }
    let (k1, k2) = (kappa[0], kappa[1]);
    let rhs = Mat::from_fn(3, 1, |i, _| match i {
        0 => k2.powi(-2),
        1 => k1.powi(-2) - k2.powi(-2),
        _ => 0.0,
    });
    let x = m.partial_piv_lu().solve(&rhs);
    Ok(CavityReference {
        params,
        a1: x[(0, 0)],
        a2: x[(1, 0)],
        b2: x[(2, 0)],
        condition,
    })
}

impl CavityReference {
    /// `p(r)` and `∂_r p` in region 1 or 2.
    pub fn radial(&self, r: f64, region: usize) -> (f64, f64) {
        let j = if region <= 1 { 0 } else { 1 };
        let k = self.params.kappa[j];
        let (a, b) = if j == 0 { (self.a1, 0.0) } else { (self.a2, self.b2) };
        if r == 0.0 {
            // Y₀ is singular but B₁ = 0 in the region containing the origin
            return (a - k.powi(-2), 0.0);
        }
        let v = bessel_pair(k * r);
        let (y0, y1) = if b == 0.0 { (0.0, 0.0) } else { (v.y[0], v.y[1]) };
        (a * v.j[0] + b * y0 - k.powi(-2), -k * (a * v.j[1] + b * y1))
    }
}

impl ReferenceField for CavityReference {
    fn eval(&self, x: [f64; 2], region: usize) -> (C64, [C64; 2]) {
        let j = if region <= 1 { 0 } else { 1 };
        let r = x[0].hypot(x[1]);
        let (p, dp) = self.radial(r, region);
        if r == 0.0 {
            return (C64::new(p, 0.0), [C64::new(0.0, 0.0); 2]);
        }
        let scale = dp / r / (C64::i() * self.params.kappa[j] * self.params.eta[j]);
        (C64::new(p, 0.0), [scale * x[0], scale * x[1]])
    }

    /// The wall condition is `p = 0` on the polygonal boundary too, not the
    /// analytic `p` sampled off the circle.
    fn boundary_datum(&self, x: [f64; 2], region: usize, n: [f64; 2], eta: f64, tag: BoundaryTag) -> C64 {
        if tag == BoundaryTag::Dirichlet {
            return C64::new(0.0, 0.0);
        }
        let (p, u) = self.eval(x, region);
        let un = u[0] * n[0] + u[1] * n[1];
        match tag {
            BoundaryTag::Neumann => un,
            BoundaryTag::Robin => p - un * eta,
            _ => C64::new(0.0, 0.0),
        }
    }

    fn volume_source(&self, coeffs: &ElementCoeffs) -> C64 {
        -1.0 / (C64::i() * coeffs.kappa * coeffs.eta)
    }
}
