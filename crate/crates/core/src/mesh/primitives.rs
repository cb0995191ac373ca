//! Procedural test geometry: icospheres, grid planes and quads.

use std::collections::BTreeMap;

use crate::math::Vec3;
use crate::mesh::TriangleMesh;

/// Unit icosahedron subdivided `subdivisions` times and scaled to `radius`.
/// Vertices lie exactly on the sphere; winding is outward.
pub fn icosphere(subdivisions: u32, radius: f64) -> TriangleMesh {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut positions: Vec<Vec3> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalized())
    .collect();

    let mut triangles: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoints: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for tri in &triangles {
            let mid = |a: u32, b: u32, positions: &mut Vec<Vec3>, cache: &mut BTreeMap<(u32, u32), u32>| {
                let key = (a.min(b), a.max(b));
                *cache.entry(key).or_insert_with(|| {
                    let m = ((positions[a as usize] + positions[b as usize]) * 0.5).normalized();
                    positions.push(m);
                    (positions.len() - 1) as u32
                })
            };
            let [a, b, c] = *tri;
            let ab = mid(a, b, &mut positions, &mut midpoints);
            let bc = mid(b, c, &mut positions, &mut midpoints);
            let ca = mid(c, a, &mut positions, &mut midpoints);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        triangles = next;
    }

    let positions = positions.into_iter().map(|p| p * radius).collect();
    TriangleMesh::new(positions, triangles).expect("icosphere construction is valid")
}

/// Regular grid of `nx` x `ny` vertices in the z = 0 plane spanning
/// `[-half_extent, half_extent]^2`, triangulated with a consistent diagonal.
/// Normals of every face point toward +Z.
pub fn grid_plane_xy(nx: usize, ny: usize, half_extent: f64) -> TriangleMesh {
    assert!(nx >= 2 && ny >= 2);
    let mut positions = Vec::with_capacity(nx * ny);
    for r in 0..ny {
        for c in 0..nx {
            let x = -half_extent + 2.0 * half_extent * c as f64 / (nx - 1) as f64;
            let y = -half_extent + 2.0 * half_extent * r as f64 / (ny - 1) as f64;
            positions.push(Vec3::new(x, y, 0.0));
        }
    }
    let mut triangles = Vec::with_capacity((nx - 1) * (ny - 1) * 2);
    let idx = |r: usize, c: usize| (r * nx + c) as u32;
    for r in 0..ny - 1 {
        for c in 0..nx - 1 {
            triangles.push([idx(r, c), idx(r, c + 1), idx(r + 1, c + 1)]);
            triangles.push([idx(r, c), idx(r + 1, c + 1), idx(r + 1, c)]);
        }
    }
    TriangleMesh::new(positions, triangles).expect("grid construction is valid")
}

/// Two triangles spanning the quad `p0 p1 p2 p3` (counter-clockwise).
pub fn quad(p0: Vec3, p1: Vec3, p2: Vec3, p3: Vec3) -> TriangleMesh {
    TriangleMesh::new(vec![p0, p1, p2, p3], vec![[0, 1, 2], [0, 2, 3]])
        .expect("quad construction is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts() {
        let m = icosphere(0, 1.0);
        assert_eq!(m.vertex_count(), 12);
        assert_eq!(m.triangle_count(), 20);
        let m = icosphere(2, 1.0);
        assert_eq!(m.triangle_count(), 320);
        for p in m.positions() {
            assert!((p.length() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_is_planar() {
        let m = grid_plane_xy(4, 3, 2.0);
        assert_eq!(m.vertex_count(), 12);
        assert_eq!(m.triangle_count(), 12);
        assert!(m.positions().iter().all(|p| p.z == 0.0));
    }
}
