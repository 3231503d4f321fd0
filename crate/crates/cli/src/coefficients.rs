//! Per-element coefficient files: one `element c rho` record per line,
//! whitespace or comma separated, `#` comments.

use anyhow::{anyhow, bail, Result};
use chdg::mesh::{Material, Mesh};

/// `(c, ρ)` per element, indexed by element.
pub fn parse_coefficients(text: &str, num_elements: usize) -> Result<Vec<(f64, f64)>> {
    let mut records: Vec<Option<(f64, f64)>> = vec![None; num_elements];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let [k, c, rho] = fields[..] else {
            bail!("line {}: expected 'element c rho', got '{line}'", i + 1);
        };
        let k: usize = k.parse().map_err(|_| anyhow!("line {}: invalid element index '{k}'", i + 1))?;
        let c: f64 = c.parse().map_err(|_| anyhow!("line {}: invalid c '{c}'", i + 1))?;
        let rho: f64 = rho.parse().map_err(|_| anyhow!("line {}: invalid rho '{rho}'", i + 1))?;
        if k >= num_elements {
            bail!("line {}: element {k} out of range (mesh has {num_elements})", i + 1);
        }
        if !(c > 0.0 && c.is_finite() && rho > 0.0 && rho.is_finite()) {
            bail!("line {}: element {k} needs positive c and rho, got {c}, {rho}", i + 1);
        }
        if records[k].replace((c, rho)).is_some() {
            bail!("line {}: element {k} listed twice", i + 1);
        }
    }
    records
        .into_iter()
        .enumerate()
        .map(|(k, r)| r.ok_or_else(|| anyhow!("no coefficients for element {k}")))
        .collect()
}

/// Attaches file coefficients to `mesh` with angular frequency `omega`.
pub fn ingest_coefficients(mesh: Mesh, text: &str, omega: f64) -> Result<Mesh> {
    let records = parse_coefficients(text, mesh.num_elements())?;
    let materials: Vec<Material> = records.into_iter().map(|(c, rho)| Material { omega, c, rho }).collect();
    Ok(mesh.with_element_coefficients(&materials)?)
}
