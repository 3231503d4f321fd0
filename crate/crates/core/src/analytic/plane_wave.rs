//! Plane wave refracted at the interface `x = 1/2`.

use std::f64::consts::FRAC_PI_4;

use super::ReferenceField;
use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct PlaneWaveParams {
    pub kappa: [f64; 2],
    pub eta: [f64; 2],
    pub theta_i: f64,
}

impl PlaneWaveParams {
    pub fn homogeneous(kappa: f64, eta: f64) -> Self {
        PlaneWaveParams {
            kappa: [kappa, kappa],
            eta: [eta, eta],
            theta_i: FRAC_PI_4,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PlaneWaveReference {
    pub kappa: [f64; 2],
    pub eta: [f64; 2],
    pub theta_i: f64,
    pub theta_t: f64,
    pub r: C64,
    pub t: C64,
}

pub fn plane_wave_reference(params: PlaneWaveParams) -> Result<PlaneWaveReference> {
    let PlaneWaveParams { kappa, eta, theta_i } = params;
    if kappa.iter().chain(&eta).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::Domain("plane wave needs positive kappa and eta".into()));
    }
    let s = kappa[0] / kappa[1] * theta_i.sin();
    if s.abs() > 1.0 {
        return Err(Error::Domain(format!(
            "evanescent transmitted wave (sin theta_T = {s:.6} > 1)"
        )));
    }
    let theta_t = s.asin();
    let (ci, ct) = (theta_i.cos(), theta_t.cos());
    let denom = eta[0] * ct + eta[1] * ci;
    let r = C64::from_polar(1.0, kappa[0] * ci) * ((eta[1] * ci - eta[0] * ct) / denom);
    let t = C64::from_polar(1.0, (kappa[0] * ci - kappa[1] * ct) / 2.0) * (2.0 * eta[1] * ci / denom);
    Ok(PlaneWaveReference {
        kappa,
        eta,
        theta_i,
        theta_t,
        r,
        t,
    })
}

impl PlaneWaveReference {
    /// Pressure and gradient on the side of `x = 1/2` given by `region` (1 or 2).
    pub fn pressure(&self, x: [f64; 2], region: usize) -> (C64, [C64; 2]) {
        let i = C64::i();
        if region <= 1 {
            let k = self.kappa[0];
            let (c, s) = (self.theta_i.cos(), self.theta_i.sin());
            let inc = (i * k * (x[0] * c + x[1] * s)).exp();
            let refl = self.r * (i * k * (-x[0] * c + x[1] * s)).exp();
            let p = inc + refl;
            (p, [i * k * c * (inc - refl), i * k * s * p])
        } else {
            let k = self.kappa[1];
            let (c, s) = (self.theta_t.cos(), self.theta_t.sin());
            let p = self.t * (i * k * (x[0] * c + x[1] * s)).exp();
            (p, [i * k * c * p, i * k * s * p])
        }
    }
}

impl ReferenceField for PlaneWaveReference {
    fn eval(&self, x: [f64; 2], region: usize) -> (C64, [C64; 2]) {
        let (p, grad) = self.pressure(x, region);
        let j = if region <= 1 { 0 } else { 1 };
        let scale = 1.0 / (C64::i() * self.kappa[j] * self.eta[j]);
        (p, [grad[0] * scale, grad[1] * scale])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn homogeneous_medium_has_no_reflection() {
        let r = plane_wave_reference(PlaneWaveParams::homogeneous(7.0, 2.0)).unwrap();
        assert!(r.r.norm() < 1e-15);
        assert!((r.t - 1.0).norm() < 1e-15);
    }

    #[test]
    fn reflection_magnitude_for_speed_contrast() {
        let params = PlaneWaveParams {
            kappa: [15.0 * PI, 30.0 * PI],
            eta: [1.0, 1.0],
            theta_i: PI / 4.0,
        };
        let r = plane_wave_reference(params).unwrap();
        let tt = ((PI / 4.0).sin() / 2.0).asin();
        let ci = (PI / 4.0).cos();
        let expected = (ci - tt.cos()).abs() / (tt.cos() + ci);
        assert!((r.r.norm() - expected).abs() < 1e-15);
    }

    #[test]
    fn interface_continuity() {
        for eta2 in [1.0, 0.5, 1.5] {
            let params = PlaneWaveParams {
                kappa: [15.0 * PI, 30.0 * PI],
                eta: [1.0, eta2],
                theta_i: PI / 4.0,
            };
            let r = plane_wave_reference(params).unwrap();
            for k in 0..100 {
                let x = [0.5, k as f64 / 99.0];
                let (p1, u1) = r.eval(x, 1);
                let (p2, u2) = r.eval(x, 2);
                assert!((p1 - p2).norm() < 1e-12);
                assert!((u1[0] - u2[0]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_evanescent_regime() {
        let params = PlaneWaveParams {
            kappa: [30.0, 10.0],
            eta: [1.0, 1.0],
            theta_i: PI / 4.0,
        };
        assert!(plane_wave_reference(params).is_err());
    }

    #[test]
    fn satisfies_the_first_order_system() {
        // -iκ/η p + div u = 0 and -iκη u + ∇p = 0, by central differences
        let params = PlaneWaveParams {
            kappa: [10.0, 14.0],
            eta: [1.0, 0.7],
            theta_i: PI / 4.0,
        };
        let r = plane_wave_reference(params).unwrap();
        let d = 1e-5;
        for (x, region) in [([0.2, 0.3], 1), ([0.8, 0.6], 2)] {
            let j = region - 1;
            let (k, eta) = (params.kappa[j], params.eta[j]);
            let (p, u) = r.eval(x, region);
            let dp = |a: usize| {
                let mut xp = x;
                let mut xm = x;
                xp[a] += d;
                xm[a] -= d;
                (r.eval(xp, region), r.eval(xm, region))
            };
            let ((px, uxp), (mx, uxm)) = dp(0);
            let ((py, uyp), (my, uym)) = dp(1);
            let grad = [(px - mx) / (2.0 * d), (py - my) / (2.0 * d)];
            let div = (uxp[0] - uxm[0]) / (2.0 * d) + (uyp[1] - uym[1]) / (2.0 * d);
            let i = C64::i();
            assert!((-i * k * eta * u[0] + grad[0]).norm() < 1e-6 * k * k);
            assert!((-i * k * eta * u[1] + grad[1]).norm() < 1e-6 * k * k);
            assert!((-i * k / eta * p + div).norm() < 1e-6 * k * k);
        }
    }
}
