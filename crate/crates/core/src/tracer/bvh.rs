//! Bounding volume hierarchy over mesh triangles.
//!
//! Median split along the longest centroid axis, at most four triangles per
//! leaf. Construction and traversal are fully deterministic; nearest-hit
//! ties are broken toward the lower original triangle index.

use crate::error::{CoreError, Result};
use crate::math::{Aabb, Vec3};
use crate::mesh::TriangleMesh;

#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub origin: Vec3,
    pub dir: Vec3,
    inv_dir: Vec3,
}

impl Ray {
    pub fn new(origin: Vec3, dir: Vec3) -> Ray {
        Ray {
            origin,
            dir,
            inv_dir: Vec3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z),
        }
    }
}

/// Nearest intersection: distance, original triangle index and the
/// Moller-Trumbore barycentrics (u weights vertex 1, v weights vertex 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub triangle: u32,
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy)]
struct PackedTriangle {
    p0: Vec3,
    e1: Vec3,
    e2: Vec3,
    index: u32,
}

#[derive(Debug, Clone)]
struct Node {
    bounds: Aabb,
    /// Leaf: first packed triangle; internal: left child (right = left + 1).
    first_or_left: u32,
    /// Number of triangles for a leaf, 0 for internal nodes.
    count: u32,
}

#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    triangles: Vec<PackedTriangle>,
}

const LEAF_SIZE: usize = 4;

impl Bvh {
    pub fn build(mesh: &TriangleMesh) -> Result<Bvh> {
        if mesh.triangle_count() == 0 {
            return Err(CoreError::Structure("cannot build BVH over an empty mesh".into()));
        }
        let mut items: Vec<(PackedTriangle, Vec3, Aabb)> = mesh
            .triangles()
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let [a, b, c] = t.map(|v| mesh.positions()[v as usize]);
                let mut bb = Aabb::EMPTY;
                bb.grow(a);
                bb.grow(b);
                bb.grow(c);
                (
                    PackedTriangle { p0: a, e1: b - a, e2: c - a, index: i as u32 },
                    (a + b + c) / 3.0,
                    bb,
                )
            })
            .collect();

        let mut nodes = Vec::with_capacity(2 * items.len());
        nodes.push(Node { bounds: Aabb::EMPTY, first_or_left: 0, count: 0 });
        let n = items.len();
        Self::build_range(&mut nodes, 0, &mut items, 0, n);
        let triangles = items.into_iter().map(|(t, _, _)| t).collect();
        Ok(Bvh { nodes, triangles })
    }

    fn build_range(
        nodes: &mut Vec<Node>,
        node: usize,
        items: &mut [(PackedTriangle, Vec3, Aabb)],
        first: usize,
        count: usize,
    ) {
        let slice = &mut items[first..first + count];
        let mut bounds = Aabb::EMPTY;
        let mut centroid_bounds = Aabb::EMPTY;
        for (_, c, bb) in slice.iter() {
            bounds.union(bb);
            centroid_bounds.grow(*c);
        }
        nodes[node].bounds = bounds;

        if count <= LEAF_SIZE {
            nodes[node].first_or_left = first as u32;
            nodes[node].count = count as u32;
            return;
        }

        let axis = centroid_bounds.longest_axis();
        slice.sort_unstable_by(|a, b| {
            a.1.axis(axis)
                .total_cmp(&b.1.axis(axis))
                .then(a.0.index.cmp(&b.0.index))
        });
        let mid = count / 2;

        let left = nodes.len();
        nodes.push(Node { bounds: Aabb::EMPTY, first_or_left: 0, count: 0 });
        nodes.push(Node { bounds: Aabb::EMPTY, first_or_left: 0, count: 0 });
        nodes[node].first_or_left = left as u32;
        nodes[node].count = 0;
        Self::build_range(nodes, left, items, first, mid);
        Self::build_range(nodes, left + 1, items, first + mid, count - mid);
    }

    /// Nearest hit with `t` strictly inside (t_min, t_max).
    pub fn intersect(&self, ray: &Ray, t_min: f64, t_max: f64) -> Option<Hit> {
        let mut best: Option<Hit> = None;
        let mut limit = t_max;
        let mut stack = [0u32; 64];
        let mut top = 0usize;
        stack[top] = 0;
        top += 1;

        while top > 0 {
            top -= 1;
            let node = &self.nodes[stack[top] as usize];
            if !hit_aabb(&node.bounds, ray, t_min, limit) {
                continue;
            }
            if node.count > 0 {
                let first = node.first_or_left as usize;
                for tri in &self.triangles[first..first + node.count as usize] {
                    if let Some((t, u, v)) = intersect_triangle(tri, ray, t_min, limit) {
                        let better = match &best {
                            None => true,
                            Some(h) => t < h.t || (t == h.t && tri.index < h.triangle),
                        };
                        if better {
                            best = Some(Hit { t, triangle: tri.index, u, v });
                            limit = t;
                        }
                    }
                }
            } else {
                stack[top] = node.first_or_left;
                stack[top + 1] = node.first_or_left + 1;
                top += 2;
            }
        }
        best
    }

    /// Whether any triangle lies within (t_min, t_max) along the ray.
    pub fn intersect_any(&self, ray: &Ray, t_min: f64, t_max: f64) -> bool {
        let mut stack = [0u32; 64];
        let mut top = 0usize;
        stack[top] = 0;
        top += 1;
        while top > 0 {
            top -= 1;
            let node = &self.nodes[stack[top] as usize];
            if !hit_aabb(&node.bounds, ray, t_min, t_max) {
                continue;
            }
            if node.count > 0 {
                let first = node.first_or_left as usize;
                for tri in &self.triangles[first..first + node.count as usize] {
                    if intersect_triangle(tri, ray, t_min, t_max).is_some() {
                        return true;
                    }
                }
            } else {
                stack[top] = node.first_or_left;
                stack[top + 1] = node.first_or_left + 1;
                top += 2;
            }
        }
        false
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Walks the tree verifying the structural invariants; used by tests.
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.triangles.len()];
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i];
            if node.count > 0 {
                for k in node.first_or_left..node.first_or_left + node.count {
                    let slot = k as usize;
                    if seen[slot] {
                        return Err(CoreError::Structure(format!(
                            "triangle slot {slot} in two leaves"
                        )));
                    }
                    seen[slot] = true;
                }
            } else {
                for child in [node.first_or_left, node.first_or_left + 1] {
                    let cb = &self.nodes[child as usize].bounds;
                    if !node.bounds.contains(cb) {
                        return Err(CoreError::Structure(format!(
                            "node {i} does not contain child {child}"
                        )));
                    }
                    stack.push(child as usize);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(CoreError::Structure("triangle missing from all leaves".into()))
        }
    }
}

/// Moller-Trumbore with inclusive barycentric bounds, so rays through shared
/// edges register in both triangles instead of leaking between them.
#[inline]
fn intersect_triangle(
    tri: &PackedTriangle,
    ray: &Ray,
    t_min: f64,
    t_max: f64,
) -> Option<(f64, f64, f64)> {
    let pvec = ray.dir.cross(tri.e2);
    let det = tri.e1.dot(pvec);
    if det.abs() < 1e-30 {
        return None;
    }
    let inv_det = 1.0 / det;
    let tvec = ray.origin - tri.p0;
    let u = tvec.dot(pvec) * inv_det;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let qvec = tvec.cross(tri.e1);
    let v = ray.dir.dot(qvec) * inv_det;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = tri.e2.dot(qvec) * inv_det;
    // Inclusive upper bound so an exact nearest-hit tie in another leaf is
    // still observed and resolved by the index tie-break.
    if t > t_min && t <= t_max {
        Some((t, u, v))
    } else {
        None
    }
}

#[inline]
fn hit_aabb(b: &Aabb, ray: &Ray, t_min: f64, t_max: f64) -> bool {
    let mut t0 = t_min;
    let mut t1 = t_max;
    for axis in 0..3 {
        let inv = ray.inv_dir.axis(axis);
        let mut near = (b.min.axis(axis) - ray.origin.axis(axis)) * inv;
        let mut far = (b.max.axis(axis) - ray.origin.axis(axis)) * inv;
        if inv < 0.0 {
            std::mem::swap(&mut near, &mut far);
        }
        t0 = t0.max(near);
        t1 = t1.min(far);
        if t0 > t1 {
            return false;
        }
    }
    true
}
