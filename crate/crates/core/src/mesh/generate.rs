//! Structured mesh generators for the two benchmark domains.

use std::collections::HashMap;
use std::f64::consts::PI;

use super::{BoundaryTag, Mesh};
use crate::error::{Error, Result};

/// `2n²` triangles on the unit square. `tags` are `[bottom, right, top, left]`.
/// Region 1 is `x < 1/2`, region 2 is `x > 1/2`.
pub fn generate_unit_square(n: usize, tags: [BoundaryTag; 4]) -> Result<Mesh> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::Mesh(format!(
            "unit square needs an even subdivision count, got {n}"
        )));
    }
    if tags.contains(&BoundaryTag::Interior) {
        return Err(Error::Mesh("side tags must be boundary classes".into()));
    }
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let h = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 * h, j as f64 * h]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    let mut regions = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v11, v01) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            let region = if 2 * i < n { 1 } else { 2 };
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
            regions.push(region);
            regions.push(region);
        }
    }
    let mut boundary = HashMap::new();
    for i in 0..n {
        boundary.insert([idx(i, 0), idx(i + 1, 0)], tags[0]);
        boundary.insert([idx(n, i), idx(n, i + 1)], tags[1]);
        boundary.insert([idx(i, n), idx(i + 1, n)], tags[2]);
        boundary.insert([idx(0, i), idx(0, i + 1)], tags[3]);
    }
    Mesh::from_parts(vertices, triangles, regions, &boundary, tags[0])
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

/// Ring triangulation of the disk of radius `r2`, with the circle of radius
/// `r1` resolved by a ring of vertices. Region 1 is inside `r1`, region 2 the
/// annulus. Every outer boundary edge gets `tag`.
pub fn generate_disk(h: f64, r1: f64, r2: f64, tag: BoundaryTag) -> Result<Mesh> {
    if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
        return Err(Error::Mesh(format!("need 0 < R1 < R2, got R1={r1}, R2={r2}")));
    }
    if !(h > 0.0) {
        return Err(Error::Mesh(format!("element size must be positive, got {h}")));
    }
    if h > r1 {
        return Err(Error::Mesh(format!("element size {h} exceeds the inner radius {r1}")));
    }
    if tag == BoundaryTag::Interior {
        return Err(Error::Mesh("outer boundary needs a boundary class".into()));
    }
    let m1 = (r1 / h).ceil() as usize;
    let m2 = ((r2 - r1) / h).ceil() as usize;
    let mut radii: Vec<f64> = (1..=m1).map(|k| k as f64 * r1 / m1 as f64).collect();
    radii.extend((1..=m2).map(|k| r1 + k as f64 * (r2 - r1) / m2 as f64));

    let mut vertices = vec![[0.0, 0.0]];
    // (first vertex index, count, angular offset) per ring
    let mut rings = Vec::with_capacity(radii.len());
    for (k, &r) in radii.iter().enumerate() {
        let count = ((2.0 * PI * r / h).ceil() as usize).max(6);
        let offset = if k % 2 == 1 { PI / count as f64 } else { 0.0 };
        let start = vertices.len();
        for i in 0..count {
            let t = offset + 2.0 * PI * i as f64 / count as f64;
            vertices.push([r * t.cos(), r * t.sin()]);
        }
        rings.push((start, count, offset));
    }

    let mut triangles = Vec::new();
    let mut regions = Vec::new();
    let (s0, n0, _) = rings[0];
    for i in 0..n0 {
        triangles.push([0, s0 + i, s0 + (i + 1) % n0]);
        regions.push(1);
    }
    for k in 0..rings.len() - 1 {
        let region = if k + 1 < m1 { 1 } else { 2 };
        let (sa, na, oa) = rings[k];
        let (sb, nb, ob) = rings[k + 1];
        let ta = |i: usize| oa + 2.0 * PI * i as f64 / na as f64;
        let tb = |j: usize| ob + 2.0 * PI * j as f64 / nb as f64;
        let a = |i: usize| sa + i % na;
        let b = |j: usize| sb + j % nb;
        let (mut i, mut j) = (0, 0);
        while i < na || j < nb {
            let advance_inner = if i == na {
                false
            } else if j == nb {
                true
            } else {
                // shorter new diagonal, ties broken by angle
                let d_inner = dist(vertices[a(i + 1)], vertices[b(j)]);
                let d_outer = dist(vertices[a(i)], vertices[b(j + 1)]);
                if (d_inner - d_outer).abs() > 1e-12 * h {
                    d_inner < d_outer
                } else {
                    ta(i + 1) < tb(j + 1)
                }
            };
            if advance_inner {
                triangles.push([a(i), b(j), a(i + 1)]);
                i += 1;
            } else {
                triangles.push([a(i), b(j), b(j + 1)]);
                j += 1;
            }
            regions.push(region);
        }
    }

    let (sl, nl, _) = *rings.last().unwrap();
    let mut boundary = HashMap::new();
    for i in 0..nl {
        boundary.insert([sl + i, sl + (i + 1) % nl], tag);
    }
    Mesh::from_parts(vertices, triangles, regions, &boundary, tag)
}
