//! Pixel-aligned orthographic ray tracing of mask, depth, normal, ambient
//! occlusion and shading planes under environment lighting.

mod bvh;
mod render;
pub mod rng;

pub use bvh::{Bvh, Hit, Ray};
pub use render::render_face_pass;

use crate::compose::{ImageRGB, Mask};
use crate::error::{CoreError, Result};
use crate::math::Vec3;
use crate::mesh::TriangleMesh;

/// Orthographic camera whose view rectangle is pixel-aligned with the
/// output raster. `right` and `up` are half-extent vectors (their lengths
/// are half the view rectangle in scene units); `forward` is the unit view
/// direction and the direction of every primary ray.
#[derive(Debug, Clone)]
pub struct OrthoCamera {
    image_w: usize,
    image_h: usize,
    center: Vec3,
    right: Vec3,
    up: Vec3,
    forward: Vec3,
}

impl OrthoCamera {
    pub fn new(
        image_w: usize,
        image_h: usize,
        center: Vec3,
        right: Vec3,
        up: Vec3,
        forward: Vec3,
    ) -> Result<OrthoCamera> {
        if image_w == 0 || image_h == 0 {
            return Err(CoreError::Shape("camera raster must be non-empty".into()));
        }
        if right.length() <= 0.0 || up.length() <= 0.0 {
            return Err(CoreError::Precondition("right/up must have positive length".into()));
        }
        if (forward.length() - 1.0).abs() > 1e-6 {
            return Err(CoreError::Precondition("forward must be unit length".into()));
        }
        let r = right.normalized();
        let u = up.normalized();
        if r.dot(u).abs() > 1e-6 || r.dot(forward).abs() > 1e-6 || u.dot(forward).abs() > 1e-6 {
            return Err(CoreError::Precondition("camera axes must be orthogonal".into()));
        }
        Ok(OrthoCamera { image_w, image_h, center, right, up, forward })
    }

    pub fn image_w(&self) -> usize {
        self.image_w
    }

    pub fn image_h(&self) -> usize {
        self.image_h
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn right(&self) -> Vec3 {
        self.right
    }

    pub fn up(&self) -> Vec3 {
        self.up
    }

    pub fn forward(&self) -> Vec3 {
        self.forward
    }

    /// Point on the view rectangle for continuous pixel coordinates
    /// (column, row); pixel centers sit at half-integer coordinates.
    pub fn point_on_view_plane(&self, px: f64, py: f64) -> Vec3 {
        let sx = 2.0 * px / self.image_w as f64 - 1.0;
        let sy = 1.0 - 2.0 * py / self.image_h as f64;
        self.center + self.right * sx + self.up * sy
    }

    /// Primary ray through the center of pixel (x, y), traveling along
    /// `forward`.
    pub fn primary_ray(&self, x: usize, y: usize) -> Ray {
        let origin = self.point_on_view_plane(x as f64 + 0.5, y as f64 + 0.5);
        Ray::new(origin, self.forward)
    }

    /// Continuous pixel coordinates (column, row) of a world point under
    /// orthographic projection.
    pub fn project_point(&self, p: Vec3) -> (f64, f64) {
        let d = p - self.center;
        let sx = d.dot(self.right) / self.right.length_squared();
        let sy = d.dot(self.up) / self.up.length_squared();
        (
            (sx + 1.0) * self.image_w as f64 / 2.0,
            (1.0 - sy) * self.image_h as f64 / 2.0,
        )
    }
}

/// Sampling parameters for the render passes.
#[derive(Debug, Clone)]
pub struct RenderConfig {
    pub spp: usize,
    /// Self-intersection offset along the geometric normal, scene units.
    /// `None` resolves to 1e-4 times the scene bounding-box diagonal.
    pub ray_epsilon: Option<f64>,
    /// Occluders beyond this distance do not darken the AO pass.
    pub ao_max_distance: f64,
    pub seed: u64,
    /// Optional per-sample clamp on shading contributions.
    pub clamp_radiance: Option<f64>,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            spp: 256,
            ray_epsilon: None,
            ao_max_distance: f64::INFINITY,
            seed: 0,
            clamp_radiance: None,
        }
    }
}

impl RenderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.spp == 0 {
            return Err(CoreError::Precondition("spp must be at least 1".into()));
        }
        if let Some(eps) = self.ray_epsilon {
            if !(eps > 0.0) {
                return Err(CoreError::Precondition("ray_epsilon must be positive".into()));
            }
        }
        if !(self.ao_max_distance > 0.0) {
            return Err(CoreError::Precondition("ao_max_distance must be positive".into()));
        }
        Ok(())
    }
}

/// Per-pixel planes produced by the tracer. All planes share the camera
/// raster; `depth` is +infinity and `ao`/`shading` are zero off the mask.
#[derive(Debug, Clone, PartialEq)]
pub struct GBuffer {
    width: usize,
    height: usize,
    mask: Vec<bool>,
    depth: Vec<f64>,
    normal: Vec<[f64; 3]>,
    ao: Vec<f64>,
    shading: Vec<[f64; 3]>,
}

impl GBuffer {
    pub fn new(width: usize, height: usize) -> GBuffer {
        GBuffer {
            width,
            height,
            mask: vec![false; width * height],
            depth: vec![f64::INFINITY; width * height],
            normal: vec![[0.0; 3]; width * height],
            ao: vec![0.0; width * height],
            shading: vec![[0.0; 3]; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn depth(&self) -> &[f64] {
        &self.depth
    }

    pub fn normal(&self) -> &[[f64; 3]] {
        &self.normal
    }

    pub fn ao(&self) -> &[f64] {
        &self.ao
    }

    pub fn shading(&self) -> &[[f64; 3]] {
        &self.shading
    }

    pub fn mask_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn mask_plane(&self) -> Mask {
        Mask::new(self.width, self.height, self.mask.clone()).expect("dims match")
    }

    /// Shading plane as an image with the mask attached as alpha.
    pub fn shading_image(&self) -> ImageRGB {
        let img = ImageRGB::new(self.width, self.height, self.shading.clone())
            .expect("shading plane is finite and non-negative");
        img.with_mask(self.mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect())
            .expect("dims match")
    }

    /// Checks the documented plane invariants; used by tests.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.mask.len() {
            if self.mask[i] {
                if !(self.ao[i] >= 0.0 && self.ao[i] <= 1.0) {
                    return Err(CoreError::Numerical(format!("ao out of range at {i}")));
                }
                let n = Vec3::new(self.normal[i][0], self.normal[i][1], self.normal[i][2]);
                if (n.length() - 1.0).abs() > 1e-4 {
                    return Err(CoreError::Numerical(format!("non-unit normal at {i}")));
                }
                if !self.depth[i].is_finite() {
                    return Err(CoreError::Numerical(format!("masked pixel {i} has no depth")));
                }
            } else {
                if self.ao[i] != 0.0 {
                    return Err(CoreError::Numerical(format!("ao nonzero off mask at {i}")));
                }
                if self.depth[i] != f64::INFINITY {
                    return Err(CoreError::Numerical(format!("finite depth off mask at {i}")));
                }
            }
        }
        Ok(())
    }
}

/// Immutable scene: a mesh with shading normals plus its BVH. Safe to share
/// across render workers.
pub struct Scene {
    mesh: TriangleMesh,
    bvh: Bvh,
    default_epsilon: f64,
}

impl Scene {
    /// Prepares a mesh for rendering, computing vertex normals when absent.
    pub fn new(mesh: TriangleMesh) -> Result<Scene> {
        let mesh = if mesh.vertex_normals().is_some() {
            mesh
        } else {
            mesh.compute_vertex_normals().0
        };
        let bvh = Bvh::build(&mesh)?;
        let default_epsilon = 1e-4 * mesh.bounds().diagonal();
        Ok(Scene { mesh, bvh, default_epsilon })
    }

    pub fn mesh(&self) -> &TriangleMesh {
        &self.mesh
    }

    pub fn bvh(&self) -> &Bvh {
        &self.bvh
    }

    pub(crate) fn epsilon(&self, cfg: &RenderConfig) -> f64 {
        cfg.ray_epsilon.unwrap_or(self.default_epsilon)
    }
}
