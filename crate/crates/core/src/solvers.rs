//! Fixed-point, CGNR and GMRES iterations on a [`LinearOperator`].
//!
//! All solvers start from `x₀ = 0`, stop on the relative residual
//! `‖b - Ax‖/‖b‖ ≤ tol`, and record one history entry per iteration
//! (entry 0 is the initial residual).

use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::hybrid::LinearOperator;
use crate::{linalg, C64};

/// Divergence is flagged once the relative residual exceeds this multiple of its initial value.
pub const DIVERGENCE_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    FixedPoint,
    Cgnr,
    Gmres,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::FixedPoint => "fixed_point",
            Method::Cgnr => "cgnr",
            Method::Gmres => "gmres",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed_point" => Ok(Method::FixedPoint),
            "cgnr" => Ok(Method::Cgnr),
            "gmres" => Ok(Method::Gmres),
            _ => Err(Error::InvalidInput(format!("unknown iterative solver '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// GMRES cycle length; `None` runs without restart.
    pub restart: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: 1000,
            restart: None,
        }
    }
}

/// Per-iteration callback.
pub trait Monitor {
    /// Whether the current iterate should be formed and passed to [`Monitor::observe`].
    fn wants_iterate(&self, _iteration: usize) -> bool {
        false
    }

    /// Called once per iteration; may return an error measurement.
    fn observe(&mut self, iteration: usize, residual: f64, iterate: Option<&[C64]>) -> Option<f64>;

    /// Asks the solver to stop after the current iteration.
    fn stop(&self) -> bool {
        false
    }
}

/// Records nothing.
pub struct NoMonitor;

impl Monitor for NoMonitor {
    fn observe(&mut self, _: usize, _: f64, _: Option<&[C64]>) -> Option<f64> {
        None
    }
}

/// Error tracking: evaluates `error(iterate)` every `every` iterations.
pub struct ErrorTracker<F> {
    pub every: usize,
    error: F,
    target: Option<f64>,
    reached: bool,
}

pub fn track_error<F: FnMut(&[C64]) -> f64>(every: usize, error: F) -> ErrorTracker<F> {
    ErrorTracker {
        every: every.max(1),
        error,
        target: None,
        reached: false,
    }
}

impl<F> ErrorTracker<F> {
    /// Stops the solve once a sampled error is at most `target`.
    pub fn until(mut self, target: f64) -> Self {
        self.target = Some(target);
        self
    }
}

impl<F: FnMut(&[C64]) -> f64> Monitor for ErrorTracker<F> {
    fn wants_iterate(&self, iteration: usize) -> bool {
        iteration.is_multiple_of(self.every)
    }

    fn observe(&mut self, _: usize, _: f64, iterate: Option<&[C64]>) -> Option<f64> {
        let e = iterate.map(|x| (self.error)(x));
        if let (Some(e), Some(t)) = (e, self.target) {
            self.reached |= e <= t;
        }
        e
    }

    fn stop(&self) -> bool {
        self.reached
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Timings {
    /// Iterations including operator applications, excluding monitoring.
    pub iterate: Duration,
    pub monitor: Duration,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub method: Method,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    /// `(iteration, error)` pairs from the monitor.
    pub error_history: Vec<(usize, f64)>,
    pub converged: bool,
    pub diverged: bool,
    pub breakdown: bool,
    /// The monitor ended the solve early.
    pub stopped: bool,
    pub solution: Vec<C64>,
    pub timings: Timings,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().expect("history holds the initial residual")
    }
}

struct Recorder<'m> {
    monitor: &'m mut dyn Monitor,
    residuals: Vec<f64>,
    errors: Vec<(usize, f64)>,
    started: Instant,
    monitor_time: Duration,
}

impl<'m> Recorder<'m> {
    fn new(monitor: &'m mut dyn Monitor) -> Self {
        Recorder {
            monitor,
            residuals: Vec::new(),
            errors: Vec::new(),
            started: Instant::now(),
            monitor_time: Duration::ZERO,
        }
    }

    fn stopped(&self) -> bool {
        self.monitor.stop()
    }

    fn wants(&self, iteration: usize) -> bool {
        self.monitor.wants_iterate(iteration)
    }

    fn record(&mut self, iteration: usize, residual: f64, iterate: Option<&[C64]>) {
        self.residuals.push(residual);
        let t = Instant::now();
        if let Some(e) = self.monitor.observe(iteration, residual, iterate) {
            self.errors.push((iteration, e));
        }
        self.monitor_time += t.elapsed();
    }

    fn finish(self, method: Method, solution: Vec<C64>, flags: (bool, bool, bool)) -> SolveReport {
        let total = self.started.elapsed();
        SolveReport {
            method,
            iterations: self.residuals.len() - 1,
            residual_history: self.residuals,
            error_history: self.errors,
            converged: flags.0,
            diverged: flags.1,
            breakdown: flags.2,
            stopped: self.monitor.stop(),
            solution,
            timings: Timings {
                iterate: total.saturating_sub(self.monitor_time),
                monitor: self.monitor_time,
            },
        }
    }
}

fn sub(b: &[C64], ax: &[C64]) -> Vec<C64> {
    b.iter().zip(ax).map(|(x, y)| x - y).collect()
}

/// `‖b‖`, or 1 for a zero right-hand side so residuals stay absolute.
fn scale(b: &[C64]) -> f64 {
    let nb = linalg::norm(b);
    if nb > 0.0 {
        nb
    } else {
        1.0
    }
}

/// Stationary iteration `x ← x + (b - Ax)`; for `A = I - ΠS` this is `x ← ΠS x + b`.
pub fn fixed_point(op: &dyn LinearOperator, b: &[C64], opts: &SolveOptions, monitor: &mut dyn Monitor) -> SolveReport {
    let n = op.dim();
    let nb = scale(b);
    let mut rec = Recorder::new(monitor);
    let mut x = linalg::zeros(n);
    let mut r = b.to_vec();
    let r0 = linalg::norm(&r) / nb;
    let want = rec.wants(0);
    rec.record(0, r0, want.then_some(x.as_slice()));
    let (mut converged, mut diverged) = (false, false);
    for it in 1..=opts.max_iter {
        linalg::axpy(C64::new(1.0, 0.0), &r, &mut x);
        r = sub(b, &op.apply_vec(&x));
        let res = linalg::norm(&r) / nb;
        let want = rec.wants(it);
        rec.record(it, res, want.then_some(x.as_slice()));
        if res <= opts.tol {
            converged = true;
            break;
        }
        if !res.is_finite() || res > DIVERGENCE_FACTOR * r0 {
            diverged = true;
            break;
        }
        if rec.stopped() {
            break;
        }
    }
    rec.finish(Method::FixedPoint, x, (converged, diverged, false))
}

/// Conjugate gradient on `A^H A x = A^H b`, reporting the true residual.
pub fn cgnr(op: &dyn LinearOperator, b: &[C64], opts: &SolveOptions, monitor: &mut dyn Monitor) -> SolveReport {
    let n = op.dim();
    let nb = scale(b);
    let mut rec = Recorder::new(monitor);
    let mut x = linalg::zeros(n);
    let mut r = b.to_vec();
    let r0 = linalg::norm(&r) / nb;
    let want = rec.wants(0);
    rec.record(0, r0, want.then_some(x.as_slice()));
    if r0 <= opts.tol {
        return rec.finish(Method::Cgnr, x, (true, false, false));
    }
    let mut s = op.apply_adjoint_vec(&r);
    let mut p = s.clone();
    let mut gamma = linalg::norm(&s).powi(2);
    let (mut converged, mut diverged, mut breakdown) = (false, false, false);
    for it in 1..=opts.max_iter {
        let q = op.apply_vec(&p);
        let qq = linalg::norm(&q).powi(2);
        if gamma == 0.0 || qq == 0.0 {
            breakdown = true;
            break;
        }
        let alpha = C64::new(gamma / qq, 0.0);
        linalg::axpy(alpha, &p, &mut x);
        linalg::axpy(-alpha, &q, &mut r);
        let res = linalg::norm(&r) / nb;
        let want = rec.wants(it);
        rec.record(it, res, want.then_some(x.as_slice()));
        if res <= opts.tol {
            converged = true;
            break;
        }
        if !res.is_finite() || res > DIVERGENCE_FACTOR * r0 {
            diverged = true;
            break;
        }
        if rec.stopped() {
            break;
        }
        s = op.apply_adjoint_vec(&r);
        let gamma_new = linalg::norm(&s).powi(2);
        let beta = C64::new(gamma_new / gamma, 0.0);
        gamma = gamma_new;
        for (pi, si) in p.iter_mut().zip(&s) {
            *pi = si + beta * *pi;
        }
    }
    rec.finish(Method::Cgnr, x, (converged, diverged, breakdown))
}

/// Complex Givens rotation zeroing `b` in `(a, b)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let na = a.norm();
    if b.norm() == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let r = na.hypot(b.norm());
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

/// `y` solving the leading `k × k` upper triangle of `h` against `g`.
fn back_substitute(h: &[Vec<C64>], g: &[C64], k: usize) -> Vec<C64> {
    let mut y = vec![C64::new(0.0, 0.0); k];
    for i in (0..k).rev() {
        let mut v = g[i];
        for j in i + 1..k {
            v -= h[j][i] * y[j];
        }
        y[i] = v / h[i][i];
    }
    y
}

fn combine(x: &[C64], basis: &[Vec<C64>], y: &[C64]) -> Vec<C64> {
    let mut out = x.to_vec();
    for (v, &c) in basis.iter().zip(y) {
        linalg::axpy(c, v, &mut out);
    }
    out
}

/// GMRES with modified Gram–Schmidt Arnoldi and Givens rotations. The
/// recorded residual is the Arnoldi estimate `|γ_{j+1}|/‖b‖`.
pub fn gmres(op: &dyn LinearOperator, b: &[C64], opts: &SolveOptions, monitor: &mut dyn Monitor) -> SolveReport {
    let n = op.dim();
    let nb = scale(b);
    let cycle = opts.restart.unwrap_or(opts.max_iter).max(1);
    let mut rec = Recorder::new(monitor);
    let mut x = linalg::zeros(n);
    let r0 = linalg::norm(b) / nb;
    let want = rec.wants(0);
    rec.record(0, r0, want.then_some(x.as_slice()));
    if r0 <= opts.tol {
        return rec.finish(Method::Gmres, x, (true, false, false));
    }
    let (mut converged, mut diverged, mut breakdown) = (false, false, false);
    let mut it = 0;
    while it < opts.max_iter && !converged && !diverged && !breakdown && !rec.stopped() {
        let r = sub(b, &op.apply_vec(&x));
        let beta = linalg::norm(&r);
        if beta == 0.0 {
            converged = true;
            break;
        }
        let mut basis: Vec<Vec<C64>> = vec![r.iter().map(|v| v / beta).collect()];
        // h[j] is column j of the Hessenberg matrix, rotated in place
        let mut h: Vec<Vec<C64>> = Vec::new();
        let mut rot: Vec<(f64, C64)> = Vec::new();
        let mut g = vec![C64::new(beta, 0.0)];
        let mut k = 0;
        while k < cycle && it < opts.max_iter {
            let mut w = op.apply_vec(&basis[k]);
            let mut col = vec![C64::new(0.0, 0.0); k + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij = linalg::dot(v, &w);
                col[i] = hij;
                linalg::axpy(-hij, v, &mut w);
            }
            let hnext = linalg::norm(&w);
            col[k + 1] = C64::new(hnext, 0.0);
            for (i, &(c, s)) in rot.iter().enumerate() {
                let (a, bb) = (col[i], col[i + 1]);
                col[i] = a * c + s * bb;
                col[i + 1] = -s.conj() * a + bb * c;
            }
            let (c, s) = givens(col[k], col[k + 1]);
            col[k] = col[k] * c + s * col[k + 1];
            col[k + 1] = C64::new(0.0, 0.0);
            g.push(-s.conj() * g[k]);
            g[k] *= c;
            rot.push((c, s));
            h.push(col);
            k += 1;
            it += 1;
            let res = g[k].norm() / nb;
            let want = rec.wants(it);
            let iterate = want.then(|| combine(&x, &basis, &back_substitute(&h, &g, k)));
            rec.record(it, res, iterate.as_deref());
            if res <= opts.tol {
                converged = true;
                break;
            }
            if !res.is_finite() || res > DIVERGENCE_FACTOR * r0 {
                diverged = true;
                break;
            }
            if hnext <= 1e-14 * beta {
                // happy breakdown: the Krylov space is invariant
                converged = true;
                breakdown = res > opts.tol;
                break;
            }
            if rec.stopped() {
                break;
            }
            basis.push(w.iter().map(|v| v / hnext).collect());
        }
        if k > 0 {
            let y = back_substitute(&h, &g, k);
            x = combine(&x, &basis, &y);
        }
    }
    rec.finish(Method::Gmres, x, (converged && !breakdown, diverged, breakdown))
}

pub fn solve(
    method: Method,
    op: &dyn LinearOperator,
    b: &[C64],
    opts: &SolveOptions,
    monitor: &mut dyn Monitor,
) -> SolveReport {
    match method {
        Method::FixedPoint => fixed_point(op, b, opts, monitor),
        Method::Cgnr => cgnr(op, b, opts, monitor),
        Method::Gmres => gmres(op, b, opts, monitor),
    }
}
