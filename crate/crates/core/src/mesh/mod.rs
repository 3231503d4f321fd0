//! Conforming triangle meshes with face connectivity, boundary classes and
//! piecewise-constant material coefficients.

mod generate;
mod msh;

use std::collections::{BTreeMap, HashMap};

pub use generate::{generate_disk, generate_unit_square};
pub use msh::{parse_msh, read_msh, write_msh, write_msh_string};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Interior,
    Dirichlet,
    Neumann,
    Robin,
}

impl BoundaryTag {
    /// Physical-group id used in MSH files.
    pub fn class_id(self) -> Option<usize> {
        match self {
            BoundaryTag::Interior => None,
            BoundaryTag::Dirichlet => Some(1),
            BoundaryTag::Neumann => Some(2),
            BoundaryTag::Robin => Some(3),
        }
    }

    pub fn from_class_id(id: usize) -> Option<Self> {
        match id {
            1 => Some(BoundaryTag::Dirichlet),
            2 => Some(BoundaryTag::Neumann),
            3 => Some(BoundaryTag::Robin),
            _ => None,
        }
    }
}

impl std::str::FromStr for BoundaryTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d" | "dirichlet" => Ok(BoundaryTag::Dirichlet),
            "n" | "neumann" => Ok(BoundaryTag::Neumann),
            "r" | "robin" => Ok(BoundaryTag::Robin),
            _ => Err(Error::InvalidInput(format!("unknown boundary tag '{s}'"))),
        }
    }
}

/// One side of a face: element index and local edge id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Side {
    pub element: usize,
    pub local: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// Ascending global vertex indices; this order fixes the face parameter.
    pub vertices: [usize; 2],
    pub owner: Side,
    pub neighbor: Option<Side>,
    pub tag: BoundaryTag,
    /// Outward unit normals seen from owner and neighbor.
    pub normals: [[f64; 2]; 2],
    pub length: f64,
}

impl Face {
    pub fn is_interior(&self) -> bool {
        self.neighbor.is_some()
    }

    pub fn sides(&self) -> impl Iterator<Item = Side> + '_ {
        std::iter::once(self.owner).chain(self.neighbor)
    }
}

/// Material data on one region or element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub omega: f64,
    pub c: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementCoeffs {
    pub omega: f64,
    pub c: f64,
    pub rho: f64,
    pub kappa: f64,
    pub eta: f64,
}

impl ElementCoeffs {
    pub fn new(m: Material) -> Result<Self> {
        if !(m.c > 0.0 && m.rho > 0.0 && m.omega > 0.0)
            || !(m.c.is_finite() && m.rho.is_finite() && m.omega.is_finite())
        {
            return Err(Error::Coefficients(format!(
                "need omega, c, rho > 0 (got omega={}, c={}, rho={})",
                m.omega, m.c, m.rho
            )));
        }
        Ok(ElementCoeffs {
            omega: m.omega,
            c: m.c,
            rho: m.rho,
            kappa: m.omega / m.c,
            eta: m.rho * m.c,
        })
    }
}

/// Affine map `x = v0 + J ξ` of one element.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub v0: [f64; 2],
    pub jac: [[f64; 2]; 2],
    /// `J^{-T}`, mapping reference gradients to physical ones.
    pub inv_jac_t: [[f64; 2]; 2],
    pub det: f64,
}

impl ElementGeometry {
    pub fn map(&self, xi: [f64; 2]) -> [f64; 2] {
        [
            self.v0[0] + self.jac[0][0] * xi[0] + self.jac[0][1] * xi[1],
            self.v0[1] + self.jac[1][0] * xi[0] + self.jac[1][1] * xi[1],
        ]
    }

    pub fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_jac_t[0][0] * g[0] + self.inv_jac_t[0][1] * g[1],
            self.inv_jac_t[1][0] * g[0] + self.inv_jac_t[1][1] * g[1],
        ]
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub regions: Vec<usize>,
    pub faces: Vec<Face>,
    /// Face index of each local edge; local edge `j` joins vertices `j` and `j+1`.
    pub element_faces: Vec<[usize; 3]>,
    /// Empty until coefficients are assigned.
    pub coeffs: Vec<ElementCoeffs>,
}

fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl Mesh {
    /// Builds connectivity. Boundary edges missing from `boundary_tags`
    /// receive `default_tag`. Clockwise triangles are an error here; readers
    /// reorient before calling.
    pub fn from_parts(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        regions: Vec<usize>,
        boundary_tags: &HashMap<[usize; 2], BoundaryTag>,
        default_tag: BoundaryTag,
    ) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::Mesh("no triangles".into()));
        }
        if regions.len() != triangles.len() {
            return Err(Error::Mesh("region list length differs from triangle count".into()));
        }
        for (k, t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::Mesh(format!("triangle {k} references a missing vertex")));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::Mesh(format!("triangle {k} repeats a vertex")));
            }
            let a = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if !(a > 0.0) {
                return Err(Error::Mesh(format!("triangle {k} has non-positive area {a:e}")));
            }
        }

        let mut faces: Vec<Face> = Vec::with_capacity(triangles.len() * 2);
        let mut lookup: HashMap<[usize; 2], usize> = HashMap::with_capacity(triangles.len() * 2);
        let mut element_faces = vec![[usize::MAX; 3]; triangles.len()];
        for (k, t) in triangles.iter().enumerate() {
            for j in 0..3 {
                let (a, b) = (t[j], t[(j + 1) % 3]);
                let key = [a.min(b), a.max(b)];
                let pa = vertices[a];
                let pb = vertices[b];
                let (dx, dy) = (pb[0] - pa[0], pb[1] - pa[1]);
                let len = dx.hypot(dy);
                let normal = [dy / len, -dx / len];
                let side = Side { element: k, local: j };
                match lookup.get(&key) {
                    None => {
                        lookup.insert(key, faces.len());
                        element_faces[k][j] = faces.len();
                        faces.push(Face {
                            vertices: key,
                            owner: side,
                            neighbor: None,
                            tag: default_tag,
                            normals: [normal, [-normal[0], -normal[1]]],
                            length: len,
                        });
                    }
                    Some(&f) => {
                        let face = &mut faces[f];
                        if face.neighbor.is_some() {
                            return Err(Error::Mesh(format!(
                                "edge ({}, {}) is shared by more than two triangles",
                                key[0], key[1]
                            )));
                        }
                        if face.owner.element == k {
                            return Err(Error::Mesh(format!("triangle {k} is degenerate")));
                        }
                        face.neighbor = Some(side);
                        face.tag = BoundaryTag::Interior;
                        face.normals[1] = normal;
                        element_faces[k][j] = f;
                    }
                }
            }
        }
        for (key, &tag) in boundary_tags {
            let key = [key[0].min(key[1]), key[0].max(key[1])];
            if let Some(&f) = lookup.get(&key) {
                if !faces[f].is_interior() {
                    if tag == BoundaryTag::Interior {
                        return Err(Error::Mesh("boundary edge tagged as interior".into()));
                    }
                    faces[f].tag = tag;
                }
            } else {
                return Err(Error::Mesh(format!(
                    "boundary edge ({}, {}) matches no triangle edge",
                    key[0], key[1]
                )));
            }
        }
        Ok(Mesh {
            vertices,
            triangles,
            regions,
            faces,
            element_faces,
            coeffs: Vec::new(),
        })
    }

    pub fn num_elements(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_boundary_faces(&self) -> usize {
        self.faces.iter().filter(|f| !f.is_interior()).count()
    }

    pub fn num_interior_faces(&self) -> usize {
        self.num_faces() - self.num_boundary_faces()
    }

    pub fn geometry(&self, k: usize) -> ElementGeometry {
        let [a, b, c] = self.triangles[k].map(|v| self.vertices[v]);
        let jac = [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv_jac_t = [
            [jac[1][1] / det, -jac[1][0] / det],
            [-jac[0][1] / det, jac[0][0] / det],
        ];
        ElementGeometry {
            v0: a,
            jac,
            inv_jac_t,
            det,
        }
    }

    pub fn area(&self, k: usize) -> f64 {
        let [a, b, c] = self.triangles[k].map(|v| self.vertices[v]);
        signed_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_elements()).map(|k| self.area(k)).sum()
    }

    pub fn diameter(&self, k: usize) -> f64 {
        let p = self.triangles[k].map(|v| self.vertices[v]);
        (0..3)
            .map(|j| {
                let (a, b) = (p[j], p[(j + 1) % 3]);
                (b[0] - a[0]).hypot(b[1] - a[1])
            })
            .fold(0.0, f64::max)
    }

    pub fn h_max(&self) -> f64 {
        (0..self.num_elements()).map(|k| self.diameter(k)).fold(0.0, f64::max)
    }

    pub fn centroid(&self, k: usize) -> [f64; 2] {
        let p = self.triangles[k].map(|v| self.vertices[v]);
        [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0]
    }

    /// Whether local edge `local` of element `k` runs against the face's
    /// canonical direction.
    pub fn flip(&self, k: usize, local: usize) -> bool {
        let t = &self.triangles[k];
        t[local] > t[(local + 1) % 3]
    }

    /// Outward normal of local edge `local` of element `k`.
    pub fn normal(&self, k: usize, local: usize) -> [f64; 2] {
        let face = &self.faces[self.element_faces[k][local]];
        if face.owner.element == k && face.owner.local == local {
            face.normals[0]
        } else {
            face.normals[1]
        }
    }

    /// The other side of the face behind local edge `local` of element `k`.
    pub fn across(&self, k: usize, local: usize) -> Option<Side> {
        let face = &self.faces[self.element_faces[k][local]];
        if face.owner.element == k && face.owner.local == local {
            face.neighbor
        } else {
            Some(face.owner)
        }
    }

    /// Point on face `f` at canonical parameter `t` in [0, 1].
    pub fn face_point(&self, f: usize, t: f64) -> [f64; 2] {
        let [a, b] = self.faces[f].vertices.map(|v| self.vertices[v]);
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }

    pub fn has_coefficients(&self) -> bool {
        self.coeffs.len() == self.num_elements()
    }

    pub fn region_ids(&self) -> Vec<usize> {
        let mut ids = self.regions.clone();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Sets per-element coefficients from a per-region table.
    pub fn assign_coefficients(mut self, rule: &BTreeMap<usize, Material>) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (&id, &m) in rule {
            table.insert(
                id,
                ElementCoeffs::new(m)
                    .map_err(|e| Error::Coefficients(format!("region {id}: {e}")))?,
            );
        }
        let mut coeffs = Vec::with_capacity(self.num_elements());
        for &r in &self.regions {
            let c = table
                .get(&r)
                .ok_or_else(|| Error::Coefficients(format!("no coefficients for region {r}")))?;
            coeffs.push(*c);
        }
        self.coeffs = coeffs;
        Ok(self)
    }

    /// Sets per-element coefficients directly.
    pub fn with_element_coefficients(mut self, materials: &[Material]) -> Result<Self> {
        if materials.len() != self.num_elements() {
            return Err(Error::Coefficients(format!(
                "{} coefficient records for {} elements",
                materials.len(),
                self.num_elements()
            )));
        }
        self.coeffs = materials
            .iter()
            .enumerate()
            .map(|(k, &m)| {
                ElementCoeffs::new(m).map_err(|e| Error::Coefficients(format!("element {k}: {e}")))
            })
            .collect::<Result<_>>()?;
        Ok(self)
    }

    /// Same mesh with every boundary face set to `tag`.
    pub fn with_boundary_tag(mut self, tag: BoundaryTag) -> Self {
        for f in self.faces.iter_mut().filter(|f| !f.is_interior()) {
            f.tag = tag;
        }
        self
    }

    pub fn coeffs(&self, k: usize) -> &ElementCoeffs {
        &self.coeffs[k]
    }

    /// Checks the structural invariants; used by tests and after reading files.
    pub fn validate(&self) -> Result<()> {
        for k in 0..self.num_elements() {
            if !(self.area(k) > 0.0) {
                return Err(Error::Mesh(format!("triangle {k} has non-positive area")));
            }
        }
        for (i, f) in self.faces.iter().enumerate() {
            if f.vertices[0] >= f.vertices[1] {
                return Err(Error::Mesh(format!("face {i} is not in canonical order")));
            }
            if f.is_interior() != (f.tag == BoundaryTag::Interior) {
                return Err(Error::Mesh(format!("face {i} tag disagrees with adjacency")));
            }
            if let Some(nb) = f.neighbor {
                let s = [f.normals[0][0] + f.normals[1][0], f.normals[0][1] + f.normals[1][1]];
                if s[0].hypot(s[1]) > 1e-14 {
                    return Err(Error::Mesh(format!("face {i} normals are not opposite")));
                }
                if self.element_faces[nb.element][nb.local] != i {
                    return Err(Error::Mesh(format!("face {i} neighbor link is broken")));
                }
            }
            if self.element_faces[f.owner.element][f.owner.local] != i {
                return Err(Error::Mesh(format!("face {i} owner link is broken")));
            }
        }
        for c in &self.coeffs {
            if !(c.kappa > 0.0 && c.eta > 0.0) {
                return Err(Error::Coefficients("non-positive kappa or eta".into()));
            }
        }
        Ok(())
    }
}
