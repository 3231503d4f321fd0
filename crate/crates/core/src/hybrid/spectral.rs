use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LinearOperator;
use crate::error::{Error, Result};
use crate::{linalg, C64};

/// Largest dimension accepted by the dense mode.
pub const DENSE_LIMIT: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralMode {
    Dense,
    Power { max_iter: usize, tol: f64, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct SpectralEstimate {
    pub radius: f64,
    /// Dense mode: all eigenvalues by decreasing magnitude. Power mode: empty.
    pub eigenvalues: Vec<C64>,
    pub iterations: usize,
    pub converged: bool,
}

pub fn spectral_radius(op: &dyn LinearOperator, mode: SpectralMode) -> Result<SpectralEstimate> {
    match mode {
        SpectralMode::Dense => dense(op),
        SpectralMode::Power { max_iter, tol, seed } => Ok(power(op, max_iter, tol, seed)),
    }
}

fn dense(op: &dyn LinearOperator) -> Result<SpectralEstimate> {
    let n = op.dim();
    if n > DENSE_LIMIT {
        return Err(Error::InvalidInput(format!(
            "dense spectrum of dimension {n} exceeds the limit {DENSE_LIMIT}"
        )));
    }
    let m = op.to_dense();
    let mut eigenvalues = m.eigenvalues().map_err(|_| Error::Singular {
        what: "dense eigensolver did not converge",
    })?;
    eigenvalues.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    Ok(SpectralEstimate {
        radius: eigenvalues.first().map_or(0.0, |l| l.norm()),
        eigenvalues,
        iterations: 0,
        converged: true,
    })
}

/// Power iteration on the normalized iterate. The estimate is the geometric
/// mean of the growth factors `‖A x_k‖` over a trailing window, which tends
/// to `ρ` and cannot exceed it asymptotically. Radii within the tolerance of
/// each other are not separated.
fn power(op: &dyn LinearOperator, max_iter: usize, tol: f64, seed: u64) -> SpectralEstimate {
    const WINDOW: usize = 50;
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let nx = linalg::norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut y = linalg::zeros(n);
    let mut logs: Vec<f64> = Vec::with_capacity(max_iter);
    let windowed = |logs: &[f64], end: usize| -> f64 {
        let w = WINDOW.min(end / 2).max(1);
        (logs[end - w..end].iter().sum::<f64>() / w as f64).exp()
    };
    for it in 1..=max_iter {
        op.apply(&x, &mut y);
        let ny = linalg::norm(&y);
        if ny == 0.0 {
            return SpectralEstimate {
                radius: 0.0,
                eigenvalues: Vec::new(),
                iterations: it,
                converged: true,
            };
        }
        logs.push(ny.ln());
        x.iter_mut().zip(&y).for_each(|(a, b)| *a = b / ny);
        if it >= 2 * WINDOW && it % WINDOW == 0 {
            let (now, before) = (windowed(&logs, it), windowed(&logs, it - WINDOW));
            if (now - before).abs() <= tol * now {
                return SpectralEstimate {
                    radius: now,
                    eigenvalues: Vec::new(),
                    iterations: it,
                    converged: true,
                };
            }
        }
    }
    SpectralEstimate {
        radius: if logs.is_empty() { 0.0 } else { windowed(&logs, logs.len()) },
        eigenvalues: Vec::new(),
        iterations: max_iter,
        converged: false,
    }
}
