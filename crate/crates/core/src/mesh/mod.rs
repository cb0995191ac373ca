//! Triangle meshes: OBJ ingestion, vertex normals and Laplacian smoothing.

mod obj;
pub mod primitives;
mod smooth;

pub use obj::load_obj;
pub use smooth::{laplacian_smooth, SmoothingConfig, SmoothingScheme};

use crate::error::{CoreError, Result};
use crate::math::{Aabb, Vec3};

/// Indexed triangle geometry with optional per-vertex unit normals.
///
/// Meshes are immutable after construction; every operation returns a new
/// mesh, so they can be shared read-only across render workers.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    positions: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    vertex_normals: Option<Vec<Vec3>>,
}

impl TriangleMesh {
    /// Builds a mesh without normals, validating the structural invariants.
    pub fn new(positions: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<TriangleMesh> {
        if positions.is_empty() || triangles.is_empty() {
            return Err(CoreError::Structure("mesh has no vertices or no triangles".into()));
        }
        for (i, p) in positions.iter().enumerate() {
            if !p.is_finite() {
                return Err(CoreError::Numerical(format!("vertex {i} has non-finite coordinates")));
            }
        }
        let n = positions.len() as u32;
        for (i, t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= n) {
                return Err(CoreError::Structure(format!(
                    "triangle {i} references vertex out of range (mesh has {n} vertices)"
                )));
            }
        }
        Ok(TriangleMesh { positions, triangles, vertex_normals: None })
    }

    /// Attaches per-vertex normals, which must be unit length.
    pub fn with_vertex_normals(mut self, normals: Vec<Vec3>) -> Result<TriangleMesh> {
        if normals.len() != self.positions.len() {
            return Err(CoreError::Shape(format!(
                "{} normals for {} vertices",
                normals.len(),
                self.positions.len()
            )));
        }
        for (i, nrm) in normals.iter().enumerate() {
            if !nrm.is_finite() || (nrm.length() - 1.0).abs() > 1e-6 {
                return Err(CoreError::Numerical(format!("normal {i} is not unit length")));
            }
        }
        self.vertex_normals = Some(normals);
        Ok(self)
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn vertex_normals(&self) -> Option<&[Vec3]> {
        self.vertex_normals.as_deref()
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn bounds(&self) -> Aabb {
        let mut b = Aabb::EMPTY;
        for p in &self.positions {
            b.grow(*p);
        }
        b
    }

    pub fn centroid(&self) -> Vec3 {
        let mut c = Vec3::ZERO;
        for p in &self.positions {
            c += *p;
        }
        c / self.positions.len() as f64
    }

    /// Returns the mesh with vertex normals recomputed as the area-weighted
    /// average of incident face normals, plus the number of vertices whose
    /// incident triangles were all degenerate (those fall back to +Z).
    pub fn compute_vertex_normals(&self) -> (TriangleMesh, usize) {
        let mut acc = vec![Vec3::ZERO; self.positions.len()];
        for tri in &self.triangles {
            let [a, b, c] = tri.map(|i| self.positions[i as usize]);
            // Cross-product length is twice the triangle area, so summing the
            // raw cross products is the area weighting.
            let face = (b - a).cross(c - a);
            for &v in tri {
                acc[v as usize] += face;
            }
        }
        let mut degenerate = 0usize;
        let normals: Vec<Vec3> = acc
            .into_iter()
            .map(|v| {
                if v.length() > 1e-20 {
                    v.normalized()
                } else {
                    degenerate += 1;
                    Vec3::Z
                }
            })
            .collect();
        if degenerate > 0 {
            log::warn!("{degenerate} vertices had only degenerate incident triangles; normals default to +Z");
        }
        let mesh = TriangleMesh {
            positions: self.positions.clone(),
            triangles: self.triangles.clone(),
            vertex_normals: Some(normals),
        };
        (mesh, degenerate)
    }

    pub(crate) fn replace_positions(&self, positions: Vec<Vec3>) -> TriangleMesh {
        TriangleMesh { positions, triangles: self.triangles.clone(), vertex_normals: None }
    }
}
