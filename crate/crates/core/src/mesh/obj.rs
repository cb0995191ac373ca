//! Wavefront OBJ ingestion.
//!
//! Only `v`, `vn` and `f` records are interpreted; everything else is
//! ignored. Polygons with more than three corners are fan-triangulated.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{CoreError, Result};
use crate::math::Vec3;
use crate::mesh::TriangleMesh;

pub fn load_obj(path: &Path) -> Result<TriangleMesh> {
    let file = File::open(path)?;
    parse_obj(BufReader::new(file))
}

fn parse_obj<R: BufRead>(reader: R) -> Result<TriangleMesh> {
    let mut positions: Vec<Vec3> = Vec::new();
    let mut normals: Vec<Vec3> = Vec::new();
    // (vertex, normal) indices per face corner, resolved to 0-based.
    let mut corners: Vec<(u32, Option<u32>)> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();

    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => positions.push(parse_vec3(fields, line_no)?),
            Some("vn") => normals.push(parse_vec3(fields, line_no)?),
            Some("f") => {
                let first = corners.len();
                for field in fields {
                    corners.push(parse_corner(field, positions.len(), normals.len(), line_no)?);
                }
                let count = corners.len() - first;
                if count < 3 {
                    return Err(CoreError::Parse {
                        line: line_no,
                        msg: format!("face has {count} corners, need at least 3"),
                    });
                }
                for k in 1..count - 1 {
                    triangles.push([first, first + k, first + k + 1]);
                }
            }
            _ => {}
        }
    }

    if positions.is_empty() || triangles.is_empty() {
        return Err(CoreError::Structure("OBJ contains no triangles".into()));
    }

    let tri_indices: Vec<[u32; 3]> =
        triangles.iter().map(|t| t.map(|c| corners[c].0)).collect();
    let mesh = TriangleMesh::new(positions, tri_indices)?;

    // Per-corner normals are averaged onto their vertices; if any referenced
    // vertex never received one, the file's normals are dropped entirely.
    if !normals.is_empty() {
        let mut acc = vec![Vec3::ZERO; mesh.vertex_count()];
        let mut seen = vec![false; mesh.vertex_count()];
        for &(v, n) in &corners {
            if let Some(n) = n {
                acc[v as usize] += normals[n as usize];
                seen[v as usize] = true;
            }
        }
        let mut referenced = vec![false; mesh.vertex_count()];
        for t in mesh.triangles() {
            for &v in t {
                referenced[v as usize] = true;
            }
        }
        let complete = referenced
            .iter()
            .zip(&seen)
            .all(|(&refd, &s)| !refd || s);
        if complete {
            let normals: Vec<Vec3> = acc
                .iter()
                .zip(&seen)
                .map(|(a, &s)| if s && a.length() > 1e-20 { a.normalized() } else { Vec3::Z })
                .collect();
            return mesh.with_vertex_normals(normals);
        }
        log::warn!("OBJ normals incomplete; ignoring vn records");
    }
    Ok(mesh)
}

fn parse_vec3<'a, I: Iterator<Item = &'a str>>(mut fields: I, line: usize) -> Result<Vec3> {
    let mut out = [0.0f64; 3];
    for val in &mut out {
        let field = fields.next().ok_or_else(|| CoreError::Parse {
            line,
            msg: "expected 3 coordinates".into(),
        })?;
        *val = field.parse().map_err(|_| CoreError::Parse {
            line,
            msg: format!("bad coordinate {field:?}"),
        })?;
    }
    let v = Vec3::new(out[0], out[1], out[2]);
    if !v.is_finite() {
        return Err(CoreError::Parse { line, msg: "non-finite coordinate".into() });
    }
    Ok(v)
}

/// Parses `v`, `v/vt`, `v//vn` or `v/vt/vn`, resolving negative (relative)
/// indices against the counts seen so far.
fn parse_corner(
    field: &str,
    n_positions: usize,
    n_normals: usize,
    line: usize,
) -> Result<(u32, Option<u32>)> {
    let mut parts = field.split('/');
    let v_str = parts.next().unwrap_or("");
    let _vt = parts.next();
    let vn_str = parts.next();

    let v = resolve_index(v_str, n_positions, line)?;
    let n = match vn_str {
        Some(s) if !s.is_empty() => Some(resolve_index(s, n_normals, line)?),
        _ => None,
    };
    Ok((v, n))
}

fn resolve_index(s: &str, count: usize, line: usize) -> Result<u32> {
    let raw: i64 = s
        .parse()
        .map_err(|_| CoreError::Parse { line, msg: format!("bad index {s:?}") })?;
    let idx = if raw > 0 {
        raw - 1
    } else if raw < 0 {
        count as i64 + raw
    } else {
        return Err(CoreError::Parse { line, msg: "OBJ indices are 1-based".into() });
    };
    if idx < 0 || idx >= count as i64 {
        return Err(CoreError::Structure(format!(
            "line {line}: index {raw} out of range (have {count})"
        )));
    }
    Ok(idx as u32)
}
