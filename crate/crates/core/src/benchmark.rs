//! The two benchmark problems and their parameter presets.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::str::FromStr;

use crate::analytic::{cavity_reference, plane_wave_reference, CavityParams, PlaneWaveParams, ReferenceField};
use crate::error::{Error, Result};
use crate::mesh::{generate_disk, generate_unit_square, BoundaryTag, Material, Mesh};
use crate::problem::Problem;
use crate::reference::FluxKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    /// Refracted plane wave on the unit square, Robin data on the whole boundary.
    PlaneWave,
    /// Sound-soft disk of radius 1/2 with a constant volume source.
    Cavity,
}

impl Benchmark {
    pub fn name(self) -> &'static str {
        match self {
            Benchmark::PlaneWave => "plane_wave",
            Benchmark::Cavity => "cavity",
        }
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plane_wave" => Ok(Benchmark::PlaneWave),
            "cavity" => Ok(Benchmark::Cavity),
            _ => Err(Error::InvalidInput(format!("unknown benchmark '{s}'"))),
        }
    }
}

/// A benchmark with two-region coefficients and a target mesh size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub benchmark: Benchmark,
    pub materials: [Material; 2],
    pub h: f64,
}

const fn mat(omega: f64, c: f64, rho: f64) -> Material {
    Material { omega, c, rho }
}

/// Homogeneous cases first, then the heterogeneous ones. For the latter the
/// smaller of the two region sizes is used on a uniform mesh.
pub const PRESETS: [Preset; 8] = [
    Preset {
        name: "pw-hom-1",
        benchmark: Benchmark::PlaneWave,
        materials: [mat(15.0 * PI, 1.0, 1.0), mat(15.0 * PI, 1.0, 1.0)],
        h: 1.0 / 16.0,
    },
    Preset {
        name: "pw-hom-2",
        benchmark: Benchmark::PlaneWave,
        materials: [mat(30.0 * PI, 1.0, 1.0), mat(30.0 * PI, 1.0, 1.0)],
        h: 1.0 / 34.0,
    },
    Preset {
        name: "cav-hom-1",
        benchmark: Benchmark::Cavity,
        materials: [mat(16.5, 1.0, 1.0), mat(16.5, 1.0, 1.0)],
        h: 0.04,
    },
    Preset {
        name: "cav-hom-2",
        benchmark: Benchmark::Cavity,
        materials: [mat(17.0, 1.0, 1.0), mat(17.0, 1.0, 1.0)],
        h: 0.025,
    },
    Preset {
        name: "pw-het-1",
        benchmark: Benchmark::PlaneWave,
        materials: [mat(15.0 * PI, 1.0, 1.0), mat(15.0 * PI, 0.5, 2.0)],
        h: 1.0 / 34.0,
    },
    Preset {
        name: "pw-het-2",
        benchmark: Benchmark::PlaneWave,
        materials: [mat(15.0 * PI, 1.0, 1.0), mat(15.0 * PI, 0.5, 1.0)],
        h: 1.0 / 34.0,
    },
    Preset {
        name: "cav-het-1",
        benchmark: Benchmark::Cavity,
        materials: [mat(10.0 * PI, 1.0, 1.0), mat(10.0 * PI, 2.0 / 3.0, 1.5)],
        h: 1.0 / 16.0,
    },
    Preset {
        name: "cav-het-2",
        benchmark: Benchmark::Cavity,
        materials: [mat(10.0 * PI, 1.0, 1.0), mat(10.0 * PI, 2.0 / 3.0, 1.0)],
        h: 1.0 / 16.0,
    },
];

pub fn preset(name: &str) -> Result<Preset> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .copied()
        .ok_or_else(|| Error::InvalidInput(format!("unknown preset '{name}'")))
}

/// Square subdivision count for a target size: the nearest even `n ≥ 1/h`.
pub fn square_subdivisions(h: f64) -> usize {
    let n = (1.0 / h - 1e-9).ceil().max(2.0) as usize;
    n + n % 2
}

pub fn benchmark_mesh(benchmark: Benchmark, h: f64) -> Result<Mesh> {
    match benchmark {
        Benchmark::PlaneWave => generate_unit_square(square_subdivisions(h), [BoundaryTag::Robin; 4]),
        Benchmark::Cavity => generate_disk(h, 0.25, 0.5, BoundaryTag::Dirichlet),
    }
}

/// Analytic solution for the two regions' coefficients.
pub fn reference_field(benchmark: Benchmark, materials: &[Material; 2]) -> Result<Box<dyn ReferenceField>> {
    let kappa = materials.map(|m| m.omega / m.c);
    let eta = materials.map(|m| m.rho * m.c);
    Ok(match benchmark {
        Benchmark::PlaneWave => Box::new(plane_wave_reference(PlaneWaveParams {
            kappa,
            eta,
            theta_i: PI / 4.0,
        })?),
        Benchmark::Cavity => Box::new(cavity_reference(CavityParams::new(kappa, eta))?),
    })
}

/// Mesh with coefficients, discretized problem, and reference field.
pub fn setup(
    benchmark: Benchmark,
    materials: &[Material; 2],
    mesh: Mesh,
    degree: usize,
    flux: FluxKind,
) -> Result<(Problem, Box<dyn ReferenceField>)> {
    let rule: BTreeMap<usize, Material> = [(1, materials[0]), (2, materials[1])].into_iter().collect();
    let mesh = mesh.assign_coefficients(&rule)?;
    let field = reference_field(benchmark, materials)?;
    let problem = Problem::new(mesh, degree, flux, field.as_ref())?;
    Ok((problem, field))
}

/// [`setup`] on the preset's own mesh.
pub fn setup_preset(preset: &Preset, degree: usize, flux: FluxKind) -> Result<(Problem, Box<dyn ReferenceField>)> {
    let mesh = benchmark_mesh(preset.benchmark, preset.h)?;
    setup(preset.benchmark, &preset.materials, mesh, degree, flux)
}
