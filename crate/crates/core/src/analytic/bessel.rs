//! Bessel functions of the first and second kind, orders 0 and 1.
//!
//! For `x <= 25` the first kind is obtained with Miller's backward recurrence
//! normalized by `J0 + 2 Σ J_2k = 1`; the second kind then follows from the
//! Neumann series built from the same sequence. Above that the Hankel
//! asymptotic expansion is accurate to well below one ulp.

use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::Error;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const ASYMPTOTIC_FROM: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    J,
    Y,
}

/// Evaluates `J_order(x)` or `Y_order(x)` for `order` in {0, 1}.
pub fn bessel(kind: BesselKind, order: u32, x: f64) -> Result<f64, Error> {
    if order > 1 {
        return Err(Error::Domain(format!("Bessel order {order} is not supported")));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("Bessel argument {x} is not finite")));
    }
    match kind {
        BesselKind::J => {
            let v = if x < 0.0 {
                // J0 is even, J1 is odd
                let v = bessel_pair(-x).j[order as usize];
                if order == 1 {
                    -v
                } else {
                    v
                }
            } else {
                bessel_pair(x).j[order as usize]
            };
            Ok(v)
        }
        BesselKind::Y => {
            if x <= 0.0 {
                return Err(Error::Domain(format!(
                    "Y{order} is only defined for x > 0 (got {x})"
                )));
            }
            Ok(bessel_pair(x).y[order as usize])
        }
    }
}

pub fn j0(x: f64) -> f64 {
    bessel_pair(x.abs()).j[0]
}

pub fn j1(x: f64) -> f64 {
    let v = bessel_pair(x.abs()).j[1];
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// `Y0(x)`; NaN for `x <= 0`.
pub fn y0(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NAN;
    }
    bessel_pair(x).y[0]
}

/// `Y1(x)`; NaN for `x <= 0`.
pub fn y1(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NAN;
    }
    bessel_pair(x).y[1]
}

/// All four functions at once for `x >= 0` (Y entries are meaningless at 0).
#[derive(Debug, Clone, Copy)]
pub struct BesselValues {
    pub j: [f64; 2],
    pub y: [f64; 2],
}

pub fn bessel_pair(x: f64) -> BesselValues {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return BesselValues {
            j: [1.0, 0.0],
            y: [f64::NEG_INFINITY, f64::NEG_INFINITY],
        };
    }
    if x > ASYMPTOTIC_FROM {
        hankel_asymptotic(x)
    } else {
        miller_neumann(x)
    }
}

fn miller_neumann(x: f64) -> BesselValues {
    // Start index well above x so the dominant solution of the recurrence
    // has swamped the minimal one by the time we reach n = 0.
    let start = {
        let m = x as usize + 30 + (12.0 * x.sqrt()) as usize;
        m + (m % 2)
    };
    let mut vals = vec![0.0_f64; start + 2];
    vals[start] = 1e-30;
    for k in (1..=start).rev() {
        let next = (2.0 * k as f64 / x) * vals[k] - vals[k + 1];
        vals[k - 1] = next;
        if next.abs() > 1e250 {
            for v in vals[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let mut norm = vals[0];
    for k in (2..=start).step_by(2) {
        norm += 2.0 * vals[k];
    }
    for v in vals.iter_mut() {
        *v /= norm;
    }

    let jz = vals[0];
    let jo = vals[1];
    let log_term = (x / 2.0).ln() + EULER_GAMMA;

    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut sign = -1.0;
    for k in 1..=start / 2 {
        let kf = k as f64;
        s0 += sign * vals[2 * k] / kf;
        s1 += sign * (vals[2 * k - 1] - vals[2 * k + 1]) / kf;
        sign = -sign;
    }
    let yz = FRAC_2_PI * log_term * jz - 2.0 * FRAC_2_PI * s0;
    let yo = -FRAC_2_PI * jz / x + FRAC_2_PI * log_term * jo + FRAC_2_PI * s1;

    BesselValues {
        j: [jz, jo],
        y: [yz, yo],
    }
}

fn hankel_asymptotic(x: f64) -> BesselValues {
    let (s, c) = x.sin_cos();
    let amp = (FRAC_2_PI / x).sqrt();
    let mut out = BesselValues {
        j: [0.0; 2],
        y: [0.0; 2],
    };
    for order in 0..2 {
        let mu = 4.0 * (order * order) as f64;
        let (p, q) = hankel_pq(mu, x);
        // chi = x - (order/2 + 1/4) pi, expanded so that libm reduces x exactly
        let (sin_chi, cos_chi) = if order == 0 {
            ((s - c) / 2f64.sqrt(), (c + s) / 2f64.sqrt())
        } else {
            (-(s + c) / 2f64.sqrt(), (s - c) / 2f64.sqrt())
        };
        out.j[order] = amp * (p * cos_chi - q * sin_chi);
        out.y[order] = amp * (p * sin_chi + q * cos_chi);
    }
    out
}

fn hankel_pq(mu: f64, x: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    let mut prev = f64::INFINITY;
    let z = 8.0 * x;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * z);
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        // a_k alternates between Q (odd k) and P (even k) with sign (-1)^{floor(k/2)}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    (p, q)
}

/// First positive zero of `J0` by bisection; used to locate cavity resonances.
pub fn j0_zero(index: usize) -> f64 {
    // McMahon estimate, then refine by bisection on a bracket.
    let beta = (index as f64 - 0.25) * PI;
    let guess = beta + 1.0 / (8.0 * beta);
    let mut lo = guess - 0.3;
    let mut hi = guess + 0.3;
    let flo = j0(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (j0(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 * mid {
            break;
        }
    }
    0.5 * (lo + hi)
}
