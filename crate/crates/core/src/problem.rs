//! A discretized boundary-value problem: mesh, reference tables, flux family,
//! per-face operators and projected data.

use rayon::prelude::*;

use crate::analytic::{boundary_data, ReferenceField, ZeroField};
use crate::error::{Error, Result};
use crate::fluxes::SideCoeffs;
use crate::mesh::{BoundaryTag, Mesh};
use crate::reference::{build_face_operator, build_reference, FaceOperator, FluxKind, ReferenceElement};
use crate::{linalg, C64};

fn face_operators(mesh: &Mesh, reference: &ReferenceElement, flux: FluxKind) -> Result<Vec<FaceOperator>> {
    mesh.faces
        .par_iter()
        .map(|face| {
            let own = mesh.coeffs(face.owner.element);
            let other = face.neighbor.map_or(own, |s| mesh.coeffs(s.element));
            let op = build_face_operator(flux, own.eta, other.eta, own.kappa, other.kappa, reference, face.length)?;
            Ok(if face.tag == BoundaryTag::Robin {
                op.with_robin_closure(own.eta)
            } else {
                op
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub mesh: Mesh,
    pub reference: ReferenceElement,
    pub flux: FluxKind,
    /// One operator per mesh face; Robin faces carry their closure.
    pub face_ops: Vec<FaceOperator>,
    /// Projected `s_D`, `s_N` or `s_R` per face (empty on interior faces).
    pub boundary_data: Vec<Vec<C64>>,
    /// Constant volume source `f` per element.
    pub sources: Vec<C64>,
}

impl Problem {
    pub fn new(mesh: Mesh, degree: usize, flux: FluxKind, field: &dyn ReferenceField) -> Result<Self> {
        if !mesh.has_coefficients() {
            return Err(Error::Coefficients("mesh has no coefficients assigned".into()));
        }
        mesh.validate()?;
        let reference = build_reference(degree)?;
        let face_ops = face_operators(&mesh, &reference, flux)?;
        let boundary_data = (0..mesh.num_faces())
            .into_par_iter()
            .map(|f| {
                if mesh.faces[f].is_interior() {
                    Vec::new()
                } else {
                    boundary_data(field, &mesh, f, &reference)
                }
            })
            .collect();
        let sources = mesh.coeffs.iter().map(|c| field.volume_source(c)).collect();
        Ok(Problem {
            mesh,
            reference,
            flux,
            face_ops,
            boundary_data,
            sources,
        })
    }

    /// Problem with zero boundary data and no volume source.
    pub fn homogeneous(mesh: Mesh, degree: usize, flux: FluxKind) -> Result<Self> {
        Problem::new(mesh, degree, flux, &ZeroField)
    }

    /// Same discretization with another flux family.
    pub fn with_flux(&self, flux: FluxKind) -> Result<Self> {
        let mut other = self.clone();
        other.flux = flux;
        other.face_ops = face_operators(&self.mesh, &self.reference, flux)?;
        Ok(other)
    }

    pub fn degree(&self) -> usize {
        self.reference.degree
    }

    pub fn nf(&self) -> usize {
        self.reference.nf
    }

    pub fn nv(&self) -> usize {
        self.reference.nv
    }

    pub fn num_elements(&self) -> usize {
        self.mesh.num_elements()
    }

    /// Length of a transmission vector: one block per element-face incidence.
    pub fn transmission_dim(&self) -> usize {
        3 * self.num_elements() * self.nf()
    }

    /// Length of a trace vector: one block per face.
    pub fn trace_dim(&self) -> usize {
        self.mesh.num_faces() * self.nf()
    }

    pub fn face_op(&self, k: usize, local: usize) -> &FaceOperator {
        &self.face_ops[self.mesh.element_faces[k][local]]
    }

    pub fn side_coeffs(&self, k: usize, local: usize) -> SideCoeffs {
        let own = self.mesh.coeffs(k).eta;
        let other = self.mesh.across(k, local).map_or(own, |s| self.mesh.coeffs(s.element).eta);
        SideCoeffs {
            eta_own: own,
            eta_other: other,
        }
    }

    pub fn has_volume_source(&self) -> bool {
        self.sources.iter().any(|s| s.norm() > 0.0)
    }

    pub fn has_boundary_data(&self) -> bool {
        self.boundary_data.iter().any(|b| linalg::norm(b) > 0.0)
    }
}
