use crate::mesh::{BoundaryTag, ElementCoeffs, Mesh};
use crate::reference::{EdgeRule, ReferenceElement};
use crate::{linalg, C64};

/// An exact solution `(p, u)` that supplies boundary data and error references.
pub trait ReferenceField: Send + Sync {
    /// `p` and `u` at `x`, using the formula of mesh region `region`.
    fn eval(&self, x: [f64; 2], region: usize) -> (C64, [C64; 2]);

    /// Boundary datum at `x` on a face of class `tag` with owner normal `n`
    /// and owner impedance `eta`.
    fn boundary_datum(&self, x: [f64; 2], region: usize, n: [f64; 2], eta: f64, tag: BoundaryTag) -> C64 {
        let (p, u) = self.eval(x, region);
        let un = u[0] * n[0] + u[1] * n[1];
        match tag {
            BoundaryTag::Dirichlet => p,
            BoundaryTag::Neumann => un,
            BoundaryTag::Robin => p - un * eta,
            BoundaryTag::Interior => C64::new(0.0, 0.0),
        }
    }

    /// Constant volume source of the first equation on an element.
    fn volume_source(&self, _coeffs: &ElementCoeffs) -> C64 {
        C64::new(0.0, 0.0)
    }
}

/// Zero data everywhere; used for homogeneous problems and operator tests.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl ReferenceField for ZeroField {
    fn eval(&self, _x: [f64; 2], _region: usize) -> (C64, [C64; 2]) {
        (C64::new(0.0, 0.0), [C64::new(0.0, 0.0); 2])
    }
}

/// L² projection onto the edge basis of the boundary datum of face `f`:
/// `p` (Dirichlet), `n·u` (Neumann) or `p - η n·u` (Robin). The face
/// parameter is the canonical one.
pub fn boundary_data(
    field: &dyn ReferenceField,
    mesh: &Mesh,
    f: usize,
    reference: &ReferenceElement,
) -> Vec<C64> {
    let face = &mesh.faces[f];
    let owner = face.owner.element;
    let region = mesh.regions[owner];
    let n = face.normals[0];
    let eta = mesh.coeffs[owner].eta;
    let rule = EdgeRule::with_degree(2 * reference.degree + 40);
    let mut rhs = linalg::zeros(reference.nf);
    for (&t, &w) in rule.points.iter().zip(&rule.weights) {
        let s = field.boundary_datum(mesh.face_point(f, t), region, n, eta, face.tag);
        let (psi, _) = reference.edge_basis.eval(t);
        for (r, v) in rhs.iter_mut().zip(&psi) {
            *r += s * (w * v);
        }
    }
    linalg::rmatvec(&reference.edge_mass_inv, &rhs)
}
