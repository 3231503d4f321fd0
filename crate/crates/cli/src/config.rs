//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Numbers accept products
//! and quotients of literals and `pi`, e.g. `15*pi` or `1/16`. Later keys
//! override earlier ones, and command-line `key=value` overrides are applied
//! last.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use chdg::benchmark::{self, Benchmark};
use chdg::hybrid::SpectralMode;
use chdg::mesh::Material;
use chdg::reference::FluxKind;
use chdg::solvers;

/// Parses the text into ordered `(key, value)` pairs.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected 'key = value', got '{line}'", i + 1))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
            bail!("line {}: invalid key '{k}'", i + 1);
        }
        pairs.push((k.to_string(), v.to_string()));
    }
    Ok(pairs)
}

/// Evaluates `a*b/c`-style products of numbers and `pi`.
pub fn parse_number(expr: &str) -> Result<f64> {
    let expr = expr.trim();
    if expr.is_empty() {
        bail!("empty number");
    }
    let mut value = 1.0;
    let mut op = '*';
    let mut rest = expr;
    loop {
        let cut = rest.find(['*', '/']).unwrap_or(rest.len());
        let token = rest[..cut].trim();
        let x = match token {
            "pi" => PI,
            _ => token
                .parse::<f64>()
                .map_err(|_| anyhow!("invalid number '{token}' in '{expr}'"))?,
        };
        value = if op == '*' { value * x } else { value / x };
        if cut == rest.len() {
            break;
        }
        op = rest.as_bytes()[cut] as char;
        rest = &rest[cut + 1..];
    }
    if !value.is_finite() {
        bail!("'{expr}' is not finite");
    }
    Ok(value)
}

fn parse_count(key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>().with_context(|| format!("{key}: expected a non-negative integer, got '{v}'"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkKind {
    PlaneWave,
    Cavity,
    /// MSH mesh plus a per-element coefficient file; driven by the constant
    /// source `-1/(iκη)` and compared against the direct solution.
    FromFiles,
}

impl BenchmarkKind {
    pub fn name(self) -> &'static str {
        match self {
            BenchmarkKind::PlaneWave => "plane_wave",
            BenchmarkKind::Cavity => "cavity",
            BenchmarkKind::FromFiles => "from_files",
        }
    }

    pub fn analytic(self) -> Option<Benchmark> {
        match self {
            BenchmarkKind::PlaneWave => Some(Benchmark::PlaneWave),
            BenchmarkKind::Cavity => Some(Benchmark::Cavity),
            BenchmarkKind::FromFiles => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSpec {
    Square { n: usize },
    Disk { h: f64 },
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dg,
    Hdg,
    Chdg,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Dg => "dg",
            Method::Hdg => "hdg",
            Method::Chdg => "chdg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Direct,
    Iterative(solvers::Method),
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Direct => "direct",
            Solver::Iterative(m) => m.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spectra {
    None,
    Dense,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectraOperator {
    /// `ΠS`, the fixed-point iteration matrix.
    PiS,
    /// The exchange operator alone.
    Pi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: String,
    pub benchmark: BenchmarkKind,
    pub preset: Option<String>,
    pub mesh: MeshSpec,
    pub materials: [Material; 2],
    pub coefficients: Option<PathBuf>,
    pub degree: usize,
    pub method: Method,
    pub flux: FluxKind,
    pub solver: Solver,
    pub tol: f64,
    pub max_iter: usize,
    pub restart: Option<usize>,
    /// Error sampling cadence; 0 disables tracking.
    pub error_every: usize,
    pub spectra: Spectra,
    pub spectra_operator: SpectraOperator,
    pub power_max_iter: usize,
    pub power_tol: f64,
    pub output_dir: PathBuf,
    pub export_matrix: Option<PathBuf>,
    pub seed: u64,
    pub threads: Option<usize>,
    /// Optional `method/flux/solver` list expanded by the sweep verb.
    pub variants: Vec<String>,
}

const KEYS: &[&str] = &[
    "name",
    "benchmark",
    "preset",
    "mesh",
    "n",
    "h",
    "omega",
    "c1",
    "rho1",
    "c2",
    "rho2",
    "coefficients",
    "degree",
    "method",
    "flux",
    "solver",
    "tol",
    "max_iter",
    "restart",
    "error_every",
    "spectra",
    "spectra_operator",
    "power_max_iter",
    "power_tol",
    "output_dir",
    "export_matrix",
    "seed",
    "threads",
    "variants",
];

impl RunConfig {
    /// Resolves pairs into a validated configuration.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<RunConfig> {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            if !KEYS.contains(&k.as_str()) {
                bail!("unknown key '{k}'");
            }
            map.insert(k.as_str(), v.as_str());
        }
        let get = |k: &str| map.get(k).copied();

        let preset = get("preset").map(benchmark::preset).transpose().map_err(|e| anyhow!("{e}"))?;
        let benchmark = match get("benchmark") {
            Some("plane_wave") => BenchmarkKind::PlaneWave,
            Some("cavity") => BenchmarkKind::Cavity,
            Some("from_files") => BenchmarkKind::FromFiles,
            Some(other) => bail!("benchmark: unknown value '{other}' (plane_wave, cavity, from_files)"),
            None => match preset {
                Some(p) => match p.benchmark {
                    Benchmark::PlaneWave => BenchmarkKind::PlaneWave,
                    Benchmark::Cavity => BenchmarkKind::Cavity,
                },
                None => bail!("benchmark: missing (or give a preset)"),
            },
        };
        if let (Some(p), Some(b)) = (preset, benchmark.analytic()) {
            if p.benchmark != b {
                bail!("preset '{}' belongs to the {} benchmark", p.name, p.benchmark.name());
            }
        }

        let h = get("h").map(parse_number).transpose().context("h")?;
        let n = get("n").map(|v| parse_count("n", v)).transpose()?;
        let mesh = match get("mesh") {
            Some("square") => MeshSpec::Square {
                n: n.or(h.map(benchmark::square_subdivisions))
                    .or(preset.map(|p| benchmark::square_subdivisions(p.h)))
                    .ok_or_else(|| anyhow!("mesh: square needs n or h"))?,
            },
            Some("disk") => MeshSpec::Disk {
                h: h.or(preset.map(|p| p.h)).ok_or_else(|| anyhow!("mesh: disk needs h"))?,
            },
            Some(path) => MeshSpec::File(PathBuf::from(path)),
            None => match benchmark {
                BenchmarkKind::PlaneWave => MeshSpec::Square {
                    n: n.or(h.map(benchmark::square_subdivisions))
                        .or(preset.map(|p| benchmark::square_subdivisions(p.h)))
                        .ok_or_else(|| anyhow!("mesh: plane_wave needs n or h"))?,
                },
                BenchmarkKind::Cavity => MeshSpec::Disk {
                    h: h.or(preset.map(|p| p.h)).ok_or_else(|| anyhow!("mesh: cavity needs h"))?,
                },
                BenchmarkKind::FromFiles => bail!("mesh: from_files needs an MSH path"),
            },
        };
        if let MeshSpec::Square { n } = mesh {
            if n == 0 || n % 2 == 1 {
                bail!("n: the square needs an even subdivision count, got {n}");
            }
        }

        let mut materials = preset.map(|p| p.materials).unwrap_or([Material {
            omega: 1.0,
            c: 1.0,
            rho: 1.0,
        }; 2]);
        if let Some(v) = get("omega") {
            let w = parse_number(v).context("omega")?;
            materials.iter_mut().for_each(|m| m.omega = w);
        }
        for (key, region, is_c) in [("c1", 0, true), ("rho1", 0, false), ("c2", 1, true), ("rho2", 1, false)] {
            if let Some(v) = get(key) {
                let x = parse_number(v).with_context(|| key.to_string())?;
                if !(x > 0.0) {
                    bail!("{key}: must be positive, got {x}");
                }
                if is_c {
                    materials[region].c = x;
                } else {
                    materials[region].rho = x;
                }
            }
        }
        if !(materials[0].omega > 0.0) {
            bail!("omega: must be positive");
        }
        if preset.is_none() && get("omega").is_none() && benchmark != BenchmarkKind::FromFiles {
            bail!("omega: missing (or give a preset)");
        }

        let coefficients = get("coefficients").map(PathBuf::from);
        if benchmark == BenchmarkKind::FromFiles {
            if !matches!(mesh, MeshSpec::File(_)) {
                bail!("from_files needs 'mesh' to be an MSH path");
            }
            if coefficients.is_none() {
                bail!("from_files needs a 'coefficients' file");
            }
            if get("omega").is_none() {
                bail!("omega: missing");
            }
        } else if coefficients.is_some() {
            bail!("coefficients: only valid for benchmark = from_files");
        }

        let degree = get("degree").map(|v| parse_count("degree", v)).transpose()?.unwrap_or(3);
        let method = match get("method").unwrap_or("chdg") {
            "dg" => Method::Dg,
            "hdg" => Method::Hdg,
            "chdg" => Method::Chdg,
            other => bail!("method: unknown value '{other}' (dg, hdg, chdg)"),
        };
        let flux: FluxKind = get("flux")
            .unwrap_or("sym0")
            .parse()
            .map_err(|_| anyhow!("flux: unknown value '{}' (upw, sym0, sym2)", get("flux").unwrap_or("")))?;
        let solver = match get("solver").unwrap_or("direct") {
            "direct" => Solver::Direct,
            other => Solver::Iterative(
                other
                    .parse()
                    .map_err(|_| anyhow!("solver: unknown value '{other}' (direct, fixed_point, cgnr, gmres)"))?,
            ),
        };
        match (method, solver) {
            (Method::Dg, Solver::Iterative(_)) => bail!("method dg only supports solver = direct"),
            (Method::Hdg, Solver::Iterative(solvers::Method::FixedPoint)) => {
                bail!("solver fixed_point is only valid for method = chdg")
            }
            _ => {}
        }

        let tol = get("tol").map(parse_number).transpose().context("tol")?.unwrap_or(1e-10);
        if !(tol > 0.0) {
            bail!("tol: must be positive");
        }
        let max_iter = get("max_iter").map(|v| parse_count("max_iter", v)).transpose()?.unwrap_or(1000);
        let restart = match get("restart") {
            None | Some("none") => None,
            Some("on") => Some(10),
            Some(v) => Some(parse_count("restart", v)?),
        };
        if restart == Some(0) {
            bail!("restart: cycle length must be positive");
        }
        if restart.is_some() && solver != Solver::Iterative(solvers::Method::Gmres) {
            bail!("restart is only valid for solver = gmres");
        }
        let error_every = get("error_every").map(|v| parse_count("error_every", v)).transpose()?.unwrap_or(1);
        let spectra = match get("spectra").unwrap_or("none") {
            "none" => Spectra::None,
            "dense" => Spectra::Dense,
            "power" => Spectra::Power,
            other => bail!("spectra: unknown value '{other}' (none, dense, power)"),
        };
        let spectra_operator = match get("spectra_operator").unwrap_or("pi_s") {
            "pi_s" => SpectraOperator::PiS,
            "pi" => SpectraOperator::Pi,
            other => bail!("spectra_operator: unknown value '{other}' (pi_s, pi)"),
        };
        if spectra != Spectra::None && method != Method::Chdg {
            bail!("spectra requires method = chdg");
        }
        let power_max_iter = get("power_max_iter")
            .map(|v| parse_count("power_max_iter", v))
            .transpose()?
            .unwrap_or(5000);
        let power_tol = get("power_tol").map(parse_number).transpose().context("power_tol")?.unwrap_or(1e-8);
        let seed = get("seed").map(|v| v.parse::<u64>()).transpose().context("seed")?.unwrap_or(0);
        let threads = get("threads").map(|v| parse_count("threads", v)).transpose()?;
        let variants = get("variants")
            .map(|v| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
            .unwrap_or_default();
        let name = get("name")
            .map(str::to_string)
            .unwrap_or_else(|| format!("{}-{}-{}", method.name(), flux.name(), solver.name()));
        if name.is_empty() || name.contains(['/', '\\']) {
            bail!("name: must be a plain file stem");
        }

        Ok(RunConfig {
            name,
            benchmark,
            preset: preset.map(|p| p.name.to_string()),
            mesh,
            materials,
            coefficients,
            degree,
            method,
            flux,
            solver,
            tol,
            max_iter,
            restart,
            error_every,
            spectra,
            spectra_operator,
            power_max_iter,
            power_tol,
            output_dir: PathBuf::from(get("output_dir").unwrap_or("out")),
            export_matrix: get("export_matrix").map(PathBuf::from),
            seed,
            threads,
            variants,
        })
    }

    /// Reads a file, then applies `key=value` overrides.
    pub fn load(path: Option<&std::path::Path>, overrides: &[String]) -> Result<RunConfig> {
        let mut pairs = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                let mut pairs = parse_config(&text).with_context(|| format!("in {}", p.display()))?;
                // input files named in a config are relative to the config itself
                let base = p.parent().unwrap_or(std::path::Path::new(""));
                for (k, v) in &mut pairs {
                    let is_file = match k.as_str() {
                        "mesh" => v != "square" && v != "disk",
                        "coefficients" => true,
                        _ => false,
                    };
                    if is_file && std::path::Path::new(v.as_str()).is_relative() {
                        *v = base.join(&*v).display().to_string();
                    }
                }
                pairs
            }
            None => Vec::new(),
        };
        for o in overrides {
            pairs.extend(parse_config(o).with_context(|| format!("override '{o}'"))?);
        }
        RunConfig::from_pairs(&pairs)
    }

    pub fn spectral_mode(&self) -> Option<SpectralMode> {
        match self.spectra {
            Spectra::None => None,
            Spectra::Dense => Some(SpectralMode::Dense),
            Spectra::Power => Some(SpectralMode::Power {
                max_iter: self.power_max_iter,
                tol: self.power_tol,
                seed: self.seed,
            }),
        }
    }

    pub fn solver_options(&self) -> solvers::SolveOptions {
        solvers::SolveOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            restart: self.restart,
        }
    }

    /// Every resolved setting, one `key = value` line each, round-trippable through [`parse_config`].
    pub fn resolved(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| out.push((k.to_string(), v));
        put("name", self.name.clone());
        put("benchmark", self.benchmark.name().into());
        if let Some(p) = &self.preset {
            put("preset", p.clone());
        }
        match &self.mesh {
            MeshSpec::Square { n } => {
                put("mesh", "square".into());
                put("n", n.to_string());
            }
            MeshSpec::Disk { h } => {
                put("mesh", "disk".into());
                put("h", format!("{h:e}"));
            }
            MeshSpec::File(p) => put("mesh", p.display().to_string()),
        }
        put("omega", format!("{:e}", self.materials[0].omega));
        put("c1", format!("{:e}", self.materials[0].c));
        put("rho1", format!("{:e}", self.materials[0].rho));
        put("c2", format!("{:e}", self.materials[1].c));
        put("rho2", format!("{:e}", self.materials[1].rho));
        if let Some(p) = &self.coefficients {
            put("coefficients", p.display().to_string());
        }
        put("degree", self.degree.to_string());
        put("method", self.method.name().into());
        put("flux", self.flux.name().into());
        put("solver", self.solver.name().into());
        put("tol", format!("{:e}", self.tol));
        put("max_iter", self.max_iter.to_string());
        put("restart", self.restart.map_or("none".into(), |r| r.to_string()));
        put("error_every", self.error_every.to_string());
        put(
            "spectra",
            match self.spectra {
                Spectra::None => "none",
                Spectra::Dense => "dense",
                Spectra::Power => "power",
            }
            .into(),
        );
        put(
            "spectra_operator",
            match self.spectra_operator {
                SpectraOperator::PiS => "pi_s",
                SpectraOperator::Pi => "pi",
            }
            .into(),
        );
        put("power_max_iter", self.power_max_iter.to_string());
        put("power_tol", format!("{:e}", self.power_tol));
        put("output_dir", self.output_dir.display().to_string());
        if let Some(p) = &self.export_matrix {
            put("export_matrix", p.display().to_string());
        }
        put("seed", self.seed.to_string());
        if let Some(t) = self.threads {
            put("threads", t.to_string());
        }
        if !self.variants.is_empty() {
            put("variants", self.variants.join(","));
        }
        out
    }

    /// The same run with another `method/flux/solver` combination.
    pub fn variant(&self, spec: &str) -> Result<RunConfig> {
        let parts: Vec<&str> = spec.split('/').map(str::trim).collect();
        let [method, flux, solver] = parts[..] else {
            bail!("variant '{spec}': expected method/flux/solver");
        };
        let mut pairs = self.resolved();
        pairs.retain(|(k, _)| !matches!(k.as_str(), "name" | "variants" | "restart"));
        if let Some(r) = self.restart {
            if solver == "gmres" {
                pairs.push(("restart".into(), r.to_string()));
            }
        }
        pairs.push(("method".into(), method.into()));
        pairs.push(("flux".into(), flux.into()));
        pairs.push(("solver".into(), solver.into()));
        if method != "chdg" {
            pairs.push(("spectra".into(), "none".into()));
        }
        RunConfig::from_pairs(&pairs).with_context(|| format!("variant '{spec}'"))
    }
}
