//! The run, sweep, spectra and mesh-info verbs.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use chdg::analytic::ReferenceField;
use chdg::benchmark;
use chdg::fields::{relative_energy_difference, relative_energy_error, Fields};
use chdg::hybrid::{
    chdg_operator, dg_oracle, hdg_system, precondition, spectral_radius, BlockLayout, Exchange, LinearOperator,
    SpectralEstimate,
};
use chdg::linalg::{self, SparseMatrix};
use chdg::mesh::{generate_disk, generate_unit_square, read_msh, BoundaryTag, ElementCoeffs, Mesh};
use chdg::problem::Problem;
use chdg::solvers::{self, track_error, NoMonitor, SolveReport};
use chdg::C64;

use crate::coefficients::ingest_coefficients;
use crate::config::{MeshSpec, Method, RunConfig, Solver, SpectraOperator};

/// Constant source `-1/(iκη)` with zero boundary data, for file-defined media.
struct ConstantSource;

impl ReferenceField for ConstantSource {
    fn eval(&self, _x: [f64; 2], _region: usize) -> (C64, [C64; 2]) {
        (C64::new(0.0, 0.0), [C64::new(0.0, 0.0); 2])
    }

    fn volume_source(&self, c: &ElementCoeffs) -> C64 {
        -1.0 / (C64::i() * c.kappa * c.eta)
    }
}

pub fn build_mesh(cfg: &RunConfig) -> Result<Mesh> {
    Ok(match &cfg.mesh {
        MeshSpec::Square { n } => generate_unit_square(*n, [BoundaryTag::Robin; 4])?,
        MeshSpec::Disk { h } => generate_disk(*h, 0.25, 0.5, BoundaryTag::Dirichlet)?,
        MeshSpec::File(p) => read_msh(p).with_context(|| format!("reading mesh {}", p.display()))?,
    })
}

/// Discretized problem and, for the analytic benchmarks, the exact solution.
pub fn build_problem(cfg: &RunConfig) -> Result<(Problem, Option<Box<dyn ReferenceField>>)> {
    let mesh = build_mesh(cfg)?;
    match cfg.benchmark.analytic() {
        Some(b) => {
            let (problem, field) = benchmark::setup(b, &cfg.materials, mesh, cfg.degree, cfg.flux)?;
            Ok((problem, Some(field)))
        }
        None => {
            let path = cfg.coefficients.as_ref().expect("validated");
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mesh = ingest_coefficients(mesh, &text, cfg.materials[0].omega)
                .with_context(|| format!("in {}", path.display()))?;
            Ok((Problem::new(mesh, cfg.degree, cfg.flux, &ConstantSource)?, None))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Direct,
    Converged,
    NotConverged,
    Diverged,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Direct => "direct",
            Status::Converged => "converged",
            Status::NotConverged => "not_converged",
            Status::Diverged => "diverged",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Diverged => 2,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryRow {
    pub iteration: usize,
    pub residual: Option<f64>,
    pub error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub status: Status,
    pub history: Vec<HistoryRow>,
    pub final_error: Option<f64>,
    pub spectral: Option<SpectralEstimate>,
    pub summary: Vec<(String, String)>,
}

enum Discrete<'a> {
    Dg,
    Hdg(chdg::hybrid::HdgSystem<'a>),
    Chdg(chdg::hybrid::ChdgSystem<'a>),
}

impl Discrete<'_> {
    fn reconstruct(&self, x: &[C64]) -> Fields {
        match self {
            Discrete::Dg => unreachable!("DG has no hybrid unknown"),
            Discrete::Hdg(s) => s.reconstruct(x),
            Discrete::Chdg(s) => s.reconstruct(x),
        }
    }

    fn operator(&self) -> &dyn LinearOperator {
        match self {
            Discrete::Dg => unreachable!("DG is solved monolithically"),
            Discrete::Hdg(s) => s,
            Discrete::Chdg(s) => s,
        }
    }

    fn rhs(&self) -> &[C64] {
        match self {
            Discrete::Dg => unreachable!("DG is solved monolithically"),
            Discrete::Hdg(s) => s.rhs(),
            Discrete::Chdg(s) => s.rhs(),
        }
    }

    fn layout(&self) -> BlockLayout {
        match self {
            Discrete::Hdg(_) => BlockLayout::Trace,
            _ => BlockLayout::Transmission,
        }
    }

    fn direct(&self, problem: &Problem) -> Result<(Fields, Option<Vec<C64>>)> {
        Ok(match self {
            Discrete::Dg => (dg_oracle(problem)?, None),
            Discrete::Hdg(s) => {
                let x = s.solve_direct()?;
                (s.reconstruct(&x), Some(x))
            }
            Discrete::Chdg(s) => {
                let x = s.solve_direct()?;
                (s.reconstruct(&x), Some(x))
            }
        })
    }

    fn sparse(&self) -> Option<SparseMatrix> {
        match self {
            Discrete::Dg => None,
            Discrete::Hdg(s) => Some(s.matrix().clone()),
            Discrete::Chdg(s) => Some(s.sparse_matrix()),
        }
    }
}

fn relative_residual(op: &dyn LinearOperator, b: &[C64], x: &[C64]) -> f64 {
    let ax = op.apply_vec(x);
    let r: Vec<C64> = b.iter().zip(&ax).map(|(u, v)| u - v).collect();
    linalg::norm(&r) / linalg::norm(b).max(f64::MIN_POSITIVE)
}

fn secs(d: Duration) -> String {
    format!("{:.6}", d.as_secs_f64())
}

pub fn write_sparse_triplets(m: &SparseMatrix, path: &Path) -> Result<()> {
    let mut s = String::new();
    for (i, j, v) in m.triplets() {
        writeln!(s, "{i} {j} {:.16e} {:.16e}", v.re, v.im).expect("writing to a string");
    }
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

fn spectrum(cfg: &RunConfig, problem: &Problem, system: &chdg::hybrid::ChdgSystem<'_>) -> Result<SpectralEstimate> {
    let mode = cfg.spectral_mode().unwrap_or(chdg::hybrid::SpectralMode::Dense);
    Ok(match cfg.spectra_operator {
        SpectraOperator::PiS => spectral_radius(&system.pi_s(), mode)?,
        SpectraOperator::Pi => spectral_radius(&Exchange::new(problem), mode)?,
    })
}

/// Runs one configuration without writing files.
pub fn execute(cfg: &RunConfig) -> Result<RunOutcome> {
    let t0 = Instant::now();
    let (problem, field) = build_problem(cfg)?;
    let discrete = match cfg.method {
        Method::Dg => Discrete::Dg,
        Method::Hdg => Discrete::Hdg(hdg_system(&problem)?),
        Method::Chdg => Discrete::Chdg(chdg_operator(&problem)?),
    };
    let t_setup = t0.elapsed();

    // Analytic error, or the difference to this method's direct solution.
    let reference: Option<Fields> = match (&field, cfg.solver) {
        (None, Solver::Iterative(_)) => Some(discrete.direct(&problem)?.0),
        _ => None,
    };
    let error_of = |fields: &Fields| -> Option<f64> {
        match (&field, &reference) {
            (Some(f), _) => Some(relative_energy_error(&problem, fields, f.as_ref())),
            (None, Some(r)) => Some(relative_energy_difference(&problem, fields, r)),
            (None, None) => None,
        }
    };

    if let Some(path) = &cfg.export_matrix {
        match discrete.sparse() {
            Some(m) => write_sparse_triplets(&m, path)?,
            None => bail!("export_matrix needs method hdg or chdg"),
        }
    }

    let t1 = Instant::now();
    let mut summary: Vec<(String, String)> = Vec::new();
    let (status, history, final_error, report) = match cfg.solver {
        Solver::Direct => {
            let (fields, x) = discrete.direct(&problem)?;
            let residual = x.as_ref().map(|x| relative_residual(discrete.operator(), discrete.rhs(), x));
            let err = error_of(&fields);
            let history = vec![HistoryRow {
                iteration: 0,
                residual,
                error: err,
            }];
            (Status::Direct, history, err, None)
        }
        Solver::Iterative(method) => {
            let op = discrete.operator();
            let pre = precondition(op, &problem, discrete.layout())?;
            let b = pre.to_preconditioned(discrete.rhs());
            let opts = cfg.solver_options();
            let report: SolveReport = if cfg.error_every > 0 {
                let mut tracker = track_error(cfg.error_every, |x: &[C64]| {
                    error_of(&discrete.reconstruct(&pre.from_preconditioned(x))).unwrap_or(f64::NAN)
                });
                solvers::solve(method, &pre, &b, &opts, &mut tracker)
            } else {
                solvers::solve(method, &pre, &b, &opts, &mut NoMonitor)
            };
            let fields = discrete.reconstruct(&pre.from_preconditioned(&report.solution));
            let err = error_of(&fields);
            let mut errors = report.error_history.iter().peekable();
            let history = report
                .residual_history
                .iter()
                .enumerate()
                .map(|(i, &r)| HistoryRow {
                    iteration: i,
                    residual: Some(r),
                    error: errors.next_if(|(k, _)| *k == i).map(|(_, e)| *e),
                })
                .collect();
            let status = if report.diverged {
                Status::Diverged
            } else if report.converged {
                Status::Converged
            } else {
                Status::NotConverged
            };
            (status, history, err, Some(report))
        }
    };
    let t_solve = t1.elapsed();

    let t2 = Instant::now();
    let spectral = match (&discrete, cfg.spectral_mode()) {
        (Discrete::Chdg(s), Some(_)) => Some(spectrum(cfg, &problem, s)?),
        _ => None,
    };
    let t_spectra = t2.elapsed();

    let mut put = |k: &str, v: String| summary.push((k.to_string(), v));
    put("status", status.name().into());
    put("elements", problem.num_elements().to_string());
    put("faces", problem.mesh.num_faces().to_string());
    put("h_max", format!("{:.6e}", problem.mesh.h_max()));
    match &discrete {
        Discrete::Dg => put("unknowns", (3 * problem.nv() * problem.num_elements()).to_string()),
        d => put("unknowns", d.operator().dim().to_string()),
    }
    let last = history.last().expect("history is never empty");
    put("iterations", report.as_ref().map_or(0, |r| r.iterations).to_string());
    if let Some(r) = last.residual {
        put("final_residual", format!("{r:.16e}"));
    }
    if let Some(r) = &report {
        put("converged", r.converged.to_string());
        put("diverged", r.diverged.to_string());
        put("breakdown", r.breakdown.to_string());
    }
    match final_error {
        Some(e) => put("final_error", format!("{e:.16e}")),
        None => put("final_error", "n/a (reference is the direct solution)".into()),
    }
    if let Some(s) = &spectral {
        put("spectral_radius", format!("{:.16e}", s.radius));
        put("spectral_radius_minus_one", format!("{:.6e}", s.radius - 1.0));
        put("spectral_converged", s.converged.to_string());
        for (i, l) in s.eigenvalues.iter().take(10).enumerate() {
            put(&format!("eigenvalue.{i}"), format!("{:.16e} {:+.16e}i |{:.16e}|", l.re, l.im, l.norm()));
        }
    }
    put("time_setup_s", secs(t_setup));
    put("time_solve_s", secs(t_solve));
    if let Some(r) = &report {
        put("time_monitor_s", secs(r.timings.monitor));
    }
    put("time_spectra_s", secs(t_spectra));
    put("time_total_s", secs(t0.elapsed()));

    Ok(RunOutcome {
        config: cfg.clone(),
        status,
        history,
        final_error,
        spectral,
        summary,
    })
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| format!("{v:.16e}"))
}

pub fn history_csv(history: &[HistoryRow]) -> String {
    let mut s = String::from("iteration,residual,error\n");
    for r in history {
        writeln!(s, "{},{},{}", r.iteration, fmt_opt(r.residual), fmt_opt(r.error)).expect("writing to a string");
    }
    s
}

pub fn summary_text(outcome: &RunOutcome) -> String {
    let mut s = String::from("# result\n");
    for (k, v) in &outcome.summary {
        writeln!(s, "{k} = {v}").expect("writing to a string");
    }
    s.push_str("# config\n");
    for (k, v) in outcome.config.resolved() {
        writeln!(s, "{k} = {v}").expect("writing to a string");
    }
    s
}

fn write_outputs(outcome: &RunOutcome) -> Result<()> {
    let dir = &outcome.config.output_dir;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let stem = dir.join(&outcome.config.name);
    let csv = stem.with_extension("history.csv");
    std::fs::write(&csv, history_csv(&outcome.history)).with_context(|| format!("writing {}", csv.display()))?;
    let txt = stem.with_extension("summary.txt");
    std::fs::write(&txt, summary_text(outcome)).with_context(|| format!("writing {}", txt.display()))?;
    Ok(())
}

/// Runs and writes `<name>.history.csv` and `<name>.summary.txt`.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let outcome = execute(cfg)?;
    write_outputs(&outcome)?;
    Ok(outcome)
}

/// Replaces configurations that list `variants` by one configuration per variant.
pub fn expand_variants(configs: Vec<RunConfig>) -> Result<Vec<RunConfig>> {
    let mut out = Vec::new();
    for c in configs {
        if c.variants.is_empty() {
            out.push(c);
        } else {
            for v in &c.variants {
                out.push(c.variant(v)?);
            }
        }
    }
    Ok(out)
}

#[derive(Debug)]
pub struct SweepResult {
    pub labels: Vec<String>,
    pub outcomes: Vec<RunOutcome>,
}

impl SweepResult {
    /// `iteration` then `<label>.residual` and `<label>.error` per run, padded with empty cells.
    pub fn csv(&self) -> String {
        let mut s = String::from("iteration");
        for l in &self.labels {
            write!(s, ",{l}.residual,{l}.error").expect("writing to a string");
        }
        s.push('\n');
        let rows = self.outcomes.iter().map(|o| o.history.len()).max().unwrap_or(0);
        for i in 0..rows {
            write!(s, "{i}").expect("writing to a string");
            for o in &self.outcomes {
                let r = o.history.get(i);
                write!(
                    s,
                    ",{},{}",
                    fmt_opt(r.and_then(|r| r.residual)),
                    fmt_opt(r.and_then(|r| r.error))
                )
                .expect("writing to a string");
            }
            s.push('\n');
        }
        s
    }
}

/// Runs configurations that share one discretized benchmark.
pub fn sweep(configs: &[RunConfig]) -> Result<SweepResult> {
    let Some(first) = configs.first() else {
        bail!("sweep needs at least one configuration");
    };
    for c in &configs[1..] {
        let same = c.benchmark == first.benchmark
            && c.mesh == first.mesh
            && c.materials == first.materials
            && c.coefficients == first.coefficients
            && c.degree == first.degree;
        if !same {
            bail!(
                "sweep configurations must share benchmark, mesh, coefficients and degree ('{}' differs from '{}')",
                c.name,
                first.name
            );
        }
    }
    let mut labels: Vec<String> = Vec::new();
    for c in configs {
        if labels.contains(&c.name) {
            bail!("duplicate sweep label '{}'", c.name);
        }
        labels.push(c.name.clone());
    }
    let outcomes = configs.iter().map(run).collect::<Result<Vec<_>>>()?;
    let result = SweepResult { labels, outcomes };
    std::fs::create_dir_all(&first.output_dir)?;
    let path = first.output_dir.join("sweep.csv");
    std::fs::write(&path, result.csv()).with_context(|| format!("writing {}", path.display()))?;
    Ok(result)
}

/// Spectral radius of `ΠS` (or `Π`) for a CHDG configuration.
pub fn spectra(cfg: &RunConfig) -> Result<(SpectralEstimate, usize)> {
    if cfg.method != Method::Chdg {
        bail!("spectra requires method = chdg");
    }
    let (problem, _) = build_problem(cfg)?;
    let system = chdg_operator(&problem)?;
    let est = spectrum(cfg, &problem, &system)?;
    Ok((est, system.dim()))
}

pub fn spectra_report(est: &SpectralEstimate, dim: usize) -> String {
    let mut s = String::new();
    writeln!(s, "dimension = {dim}").unwrap();
    writeln!(s, "spectral_radius = {:.16e}", est.radius).unwrap();
    writeln!(s, "spectral_radius_minus_one = {:.6e}", est.radius - 1.0).unwrap();
    writeln!(s, "converged = {}", est.converged).unwrap();
    if est.iterations > 0 {
        writeln!(s, "power_iterations = {}", est.iterations).unwrap();
    }
    for (i, l) in est.eigenvalues.iter().take(10).enumerate() {
        writeln!(s, "eigenvalue.{i} = {:.16e} {:+.16e}i |{:.16e}|", l.re, l.im, l.norm()).unwrap();
    }
    s
}

pub fn mesh_info(mesh: &Mesh) -> String {
    let mut s = String::new();
    let count = |t: BoundaryTag| mesh.faces.iter().filter(|f| f.tag == t).count();
    writeln!(s, "vertices = {}", mesh.vertices.len()).unwrap();
    writeln!(s, "elements = {}", mesh.num_elements()).unwrap();
    writeln!(s, "faces = {}", mesh.num_faces()).unwrap();
    writeln!(s, "interior_faces = {}", mesh.num_interior_faces()).unwrap();
    writeln!(s, "dirichlet_faces = {}", count(BoundaryTag::Dirichlet)).unwrap();
    writeln!(s, "neumann_faces = {}", count(BoundaryTag::Neumann)).unwrap();
    writeln!(s, "robin_faces = {}", count(BoundaryTag::Robin)).unwrap();
    for r in mesh.region_ids() {
        let n = mesh.regions.iter().filter(|&&x| x == r).count();
        writeln!(s, "region.{r} = {n}").unwrap();
    }
    writeln!(s, "area = {:.16e}", mesh.total_area()).unwrap();
    writeln!(s, "h_max = {:.16e}", mesh.h_max()).unwrap();
    s
}
