//! Gmsh MSH 2.2 ASCII reader and writer.
//!
//! Triangles (type 2) carry their region id as first tag; lines (type 1)
//! carry a boundary class id: 1 Dirichlet, 2 Neumann, 3 Robin. Boundary
//! edges without a line element default to Robin. Other element types are
//! skipped.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{BoundaryTag, Mesh};
use crate::error::{Error, Result};

pub fn read_msh(path: impl AsRef<Path>) -> Result<Mesh> {
    let text = std::fs::read_to_string(path)?;
    parse_msh(&text)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<&'a str> {
        for (i, l) in self.inner.by_ref() {
            let l = l.trim();
            if !l.is_empty() {
                self.line = i + 1;
                return Some(l);
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<&'a str> {
        self.next().ok_or_else(|| Error::Msh {
            line: self.line,
            msg: format!("unexpected end of file, expected {what}"),
        })
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Msh {
            line: self.line,
            msg: msg.into(),
        }
    }
}

fn parse_num<T: std::str::FromStr>(lines: &Lines, tok: Option<&str>, what: &str) -> Result<T> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| lines.err(format!("bad or missing {what}")))
}

pub fn parse_msh(text: &str) -> Result<Mesh> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    let mut version_seen = false;
    let mut nodes: HashMap<usize, usize> = HashMap::new();
    let mut vertices: Vec<[f64; 2]> = Vec::new();
    let mut tri_raw: Vec<([usize; 3], usize)> = Vec::new();
    let mut line_raw: Vec<([usize; 2], usize, usize)> = Vec::new();

    while let Some(l) = lines.next() {
        match l {
            "$MeshFormat" => {
                let header = lines.expect("format header")?;
                let mut it = header.split_whitespace();
                let version = it.next().unwrap_or("");
                if !version.starts_with("2.") && version != "2" {
                    return Err(Error::MshVersion(version.to_string()));
                }
                let file_type: u32 = parse_num(&lines, it.next(), "file type")?;
                if file_type != 0 {
                    return Err(lines.err("binary MSH files are not supported"));
                }
                if lines.expect("$EndMeshFormat")? != "$EndMeshFormat" {
                    return Err(lines.err("expected $EndMeshFormat"));
                }
                version_seen = true;
            }
            "$Nodes" => {
                if !version_seen {
                    return Err(lines.err("$Nodes before $MeshFormat"));
                }
                let tok = lines.expect("node count")?;
                let count: usize = parse_num(&lines, Some(tok), "node count")?;
                for _ in 0..count {
                    let row = lines.expect("node")?;
                    let mut it = row.split_whitespace();
                    let id: usize = parse_num(&lines, it.next(), "node id")?;
                    let x: f64 = parse_num(&lines, it.next(), "x")?;
                    let y: f64 = parse_num(&lines, it.next(), "y")?;
                    if !(x.is_finite() && y.is_finite()) {
                        return Err(lines.err("non-finite coordinate"));
                    }
                    if nodes.insert(id, vertices.len()).is_some() {
                        return Err(lines.err(format!("duplicate node id {id}")));
                    }
                    vertices.push([x, y]);
                }
                if lines.expect("$EndNodes")? != "$EndNodes" {
                    return Err(lines.err("expected $EndNodes"));
                }
            }
            "$Elements" => {
                if !version_seen {
                    return Err(lines.err("$Elements before $MeshFormat"));
                }
                let tok = lines.expect("element count")?;
                let count: usize = parse_num(&lines, Some(tok), "element count")?;
                for _ in 0..count {
                    let row = lines.expect("element")?;
                    let toks: Vec<&str> = row.split_whitespace().collect();
                    let ty: usize = parse_num(&lines, toks.get(1).copied(), "element type")?;
                    let ntags: usize = parse_num(&lines, toks.get(2).copied(), "tag count")?;
                    let tags = toks.get(3..3 + ntags).ok_or_else(|| lines.err("missing tags"))?;
                    let phys: usize = if ntags == 0 {
                        0
                    } else {
                        parse_num(&lines, Some(tags[0]), "physical tag")?
                    };
                    let node_toks = &toks[(3 + ntags).min(toks.len())..];
                    let node = |t: &str| -> Result<usize> {
                        let id: usize = parse_num(&lines, Some(t), "node reference")?;
                        nodes
                            .get(&id)
                            .copied()
                            .ok_or_else(|| lines.err(format!("unknown node {id}")))
                    };
                    match ty {
                        1 => {
                            if node_toks.len() != 2 {
                                return Err(lines.err("line element needs 2 nodes"));
                            }
                            line_raw.push(([node(node_toks[0])?, node(node_toks[1])?], phys, lines.line));
                        }
                        2 => {
                            if node_toks.len() != 3 {
                                return Err(lines.err("triangle element needs 3 nodes"));
                            }
                            tri_raw.push((
                                [node(node_toks[0])?, node(node_toks[1])?, node(node_toks[2])?],
                                phys,
                            ));
                        }
                        _ => {}
                    }
                }
                if lines.expect("$EndElements")? != "$EndElements" {
                    return Err(lines.err("expected $EndElements"));
                }
            }
            other if other.starts_with("$End") => {
                return Err(lines.err(format!("unmatched {other}")));
            }
            other if other.starts_with('$') => {
                // skip unknown sections
                let end = format!("$End{}", &other[1..]);
                loop {
                    if lines.expect(&end)? == end {
                        break;
                    }
                }
            }
            _ => return Err(lines.err(format!("unexpected content '{l}'"))),
        }
    }
    if !version_seen {
        return Err(Error::Msh { line: 0, msg: "missing $MeshFormat".into() });
    }

    // drop unused nodes keeping file order, reorient clockwise triangles
    let mut used = vec![usize::MAX; vertices.len()];
    for (t, _) in &tri_raw {
        for &v in t {
            used[v] = 0;
        }
    }
    let mut kept = Vec::new();
    for (v, slot) in used.iter_mut().enumerate() {
        if *slot == 0 {
            *slot = kept.len();
            kept.push(vertices[v]);
        }
    }
    let mut triangles = Vec::with_capacity(tri_raw.len());
    let mut regions = Vec::with_capacity(tri_raw.len());
    for (t, r) in &tri_raw {
        let mut t = t.map(|v| used[v]);
        let [a, b, c] = t.map(|v| kept[v]);
        let area = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        if area < 0.0 {
            t.swap(1, 2);
        }
        triangles.push(t);
        regions.push(*r);
    }
    let mut boundary = HashMap::new();
    for (pair, phys, line) in &line_raw {
        let tag = BoundaryTag::from_class_id(*phys).ok_or_else(|| Error::Msh {
            line: *line,
            msg: format!("unknown boundary class id {phys} (expected 1, 2 or 3)"),
        })?;
        let [a, b] = pair.map(|v| used[v]);
        if a == usize::MAX || b == usize::MAX {
            return Err(Error::Msh {
                line: *line,
                msg: "boundary line matches no triangle edge".into(),
            });
        }
        boundary.insert([a, b], tag);
    }
    Mesh::from_parts(kept, triangles, regions, &boundary, BoundaryTag::Robin)
}

/// Serializes in MSH 2.2 ASCII with one line element per boundary face.
pub fn write_msh_string(mesh: &Mesh) -> String {
    let mut s = String::new();
    s.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n");
    let _ = writeln!(s, "{}", mesh.vertices.len());
    for (i, v) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(s, "{} {:?} {:?} 0", i + 1, v[0], v[1]);
    }
    s.push_str("$EndNodes\n$Elements\n");
    let boundary: Vec<_> = mesh.faces.iter().filter(|f| !f.is_interior()).collect();
    let _ = writeln!(s, "{}", boundary.len() + mesh.triangles.len());
    let mut id = 1;
    for f in boundary {
        let class = f.tag.class_id().unwrap_or(3);
        let _ = writeln!(s, "{id} 1 2 {class} {class} {} {}", f.vertices[0] + 1, f.vertices[1] + 1);
        id += 1;
    }
    for (t, r) in mesh.triangles.iter().zip(&mesh.regions) {
        let _ = writeln!(s, "{id} 2 2 {r} {r} {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        id += 1;
    }
    s.push_str("$EndElements\n");
    s
}

pub fn write_msh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_msh_string(mesh))?;
    Ok(())
}
