//! The render passes: geometry (mask/depth/normal), ambient occlusion and
//! environment shading.
//!
//! One primary ray per pixel center, no anti-aliasing, so mask edges stay
//! sharp for compositing. Rows render in parallel; every pixel draws from
//! its own counter-based RNG stream, so output is bit-identical regardless
//! of worker count.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::envlight::EnvSampler;
use crate::error::Result;
use crate::math::{orthonormal_basis, Vec3};
use crate::mesh::TriangleMesh;
use crate::tracer::rng::{scrambled_02, CounterRng};
use crate::tracer::{GBuffer, OrthoCamera, Ray, RenderConfig, Scene};

/// Primary-ray surface sample at one pixel.
struct SurfaceHit {
    t: f64,
    /// Interpolated shading normal, flipped toward the camera.
    normal: Vec3,
    /// Hit point offset by epsilon along the oriented geometric normal.
    offset_point: Vec3,
}

impl Scene {
    fn primary_hit(&self, cam: &OrthoCamera, x: usize, y: usize, eps: f64) -> Option<SurfaceHit> {
        let ray = cam.primary_ray(x, y);
        let hit = self.bvh().intersect(&ray, 0.0, f64::INFINITY)?;
        let tri = self.mesh().triangles()[hit.triangle as usize];
        let [p0, p1, p2] = tri.map(|v| self.mesh().positions()[v as usize]);
        let normals = self.mesh().vertex_normals().expect("scene meshes carry normals");
        let [n0, n1, n2] = tri.map(|v| normals[v as usize]);

        let w = 1.0 - hit.u - hit.v;
        let mut n_shade = (n0 * w + n1 * hit.u + n2 * hit.v).normalized();
        if n_shade.length() == 0.0 {
            n_shade = (p1 - p0).cross(p2 - p0).normalized();
        }
        // Single-image reconstructions have inconsistent winding; face the camera.
        if n_shade.dot(ray.dir) > 0.0 {
            n_shade = -n_shade;
        }
        let mut n_geom = (p1 - p0).cross(p2 - p0).normalized();
        if n_geom.dot(n_shade) < 0.0 {
            n_geom = -n_geom;
        }
        let point = ray.origin + ray.dir * hit.t;
        Some(SurfaceHit { t: hit.t, normal: n_shade, offset_point: point + n_geom * eps })
    }

    /// Fills mask, depth and normal from one primary ray per pixel center.
    pub fn render_geometry(&self, cam: &OrthoCamera, cfg: &RenderConfig) -> Result<GBuffer> {
        cfg.validate()?;
        let (w, h) = (cam.image_w(), cam.image_h());
        let eps = self.epsilon(cfg);

        let rows: Vec<(Vec<bool>, Vec<f64>, Vec<[f64; 3]>)> = (0..h)
            .into_par_iter()
            .map(|y| {
                let mut mask = vec![false; w];
                let mut depth = vec![f64::INFINITY; w];
                let mut normal = vec![[0.0f64; 3]; w];
                for x in 0..w {
                    if let Some(hit) = self.primary_hit(cam, x, y, eps) {
                        mask[x] = true;
                        depth[x] = hit.t;
                        normal[x] = [hit.normal.x, hit.normal.y, hit.normal.z];
                    }
                }
                (mask, depth, normal)
            })
            .collect();

        let mut g = GBuffer::new(w, h);
        for (y, (mask, depth, normal)) in rows.into_iter().enumerate() {
            g.mask[y * w..(y + 1) * w].copy_from_slice(&mask);
            g.depth[y * w..(y + 1) * w].copy_from_slice(&depth);
            g.normal[y * w..(y + 1) * w].copy_from_slice(&normal);
        }
        Ok(g)
    }

    /// Fills the ambient-occlusion plane: the visible fraction of
    /// cosine-weighted hemisphere samples about the shading normal, with
    /// occluders counted only within `ao_max_distance`. Hemisphere points
    /// come from a per-pixel scrambled (0,2) set.
    pub fn render_ao(&self, cam: &OrthoCamera, cfg: &RenderConfig, g: &mut GBuffer) -> Result<()> {
        cfg.validate()?;
        let (w, h) = (cam.image_w(), cam.image_h());
        assert_eq!((g.width(), g.height()), (w, h), "gbuffer/camera raster mismatch");
        let eps = self.epsilon(cfg);
        let rng = CounterRng::new(cfg.seed);
        let spp = cfg.spp;

        let rows: Vec<Vec<f64>> = (0..h)
            .into_par_iter()
            .map(|y| {
                let mut row = vec![0.0f64; w];
                for x in 0..w {
                    let Some(hit) = self.primary_hit(cam, x, y, eps) else { continue };
                    let (tangent, bitangent) = orthonormal_basis(hit.normal);
                    let pixel = (y * w + x) as u64;
                    let scramble = (rng.scramble_word(pixel, 0), rng.scramble_word(pixel, 1));
                    let mut visible = 0usize;
                    for s in 0..spp {
                        let (u, v) = scrambled_02(s as u32, scramble);
                        let r = u.sqrt();
                        let (sp, cp) = (TAU * v).sin_cos();
                        let z = (1.0 - u).max(0.0).sqrt();
                        let dir = tangent * (r * cp) + bitangent * (r * sp) + hit.normal * z;
                        let ray = Ray::new(hit.offset_point, dir);
                        if !self.bvh().intersect_any(&ray, 0.0, cfg.ao_max_distance) {
                            visible += 1;
                        }
                    }
                    row[x] = visible as f64 / spp as f64;
                }
                row
            })
            .collect();

        for (y, row) in rows.into_iter().enumerate() {
            g.ao[y * w..(y + 1) * w].copy_from_slice(&row);
        }
        Ok(())
    }

    /// Fills the shading plane with the direct-lighting Monte Carlo estimate
    /// `mean of radiance * max(n.w, 0) / (pi * pdf)` over environment
    /// importance samples. Each pixel draws a per-pixel scrambled (0,2)
    /// point set over the sampler's two CDF coordinates.
    pub fn render_shading(
        &self,
        cam: &OrthoCamera,
        sampler: &EnvSampler,
        cfg: &RenderConfig,
        g: &mut GBuffer,
    ) -> Result<()> {
        cfg.validate()?;
        let (w, h) = (cam.image_w(), cam.image_h());
        assert_eq!((g.width(), g.height()), (w, h), "gbuffer/camera raster mismatch");
        let eps = self.epsilon(cfg);
        let rng = CounterRng::new(cfg.seed);
        let spp = cfg.spp;

        let rows: Vec<Vec<[f64; 3]>> = (0..h)
            .into_par_iter()
            .map(|y| {
                let mut row = vec![[0.0f64; 3]; w];
                for x in 0..w {
                    let Some(hit) = self.primary_hit(cam, x, y, eps) else { continue };
                    let pixel = (y * w + x) as u64;
                    let scramble = (rng.scramble_word(pixel, 2), rng.scramble_word(pixel, 3));
                    let mut acc = [0.0f64; 3];
                    for s in 0..spp {
                        let (u_row, u_col) = scrambled_02(s as u32, scramble);
                        let es = sampler.sample(u_row, u_col);
                        let cos = hit.normal.dot(es.direction);
                        if cos <= 0.0 || es.pdf <= 0.0 {
                            continue;
                        }
                        let ray = Ray::new(hit.offset_point, es.direction);
                        if self.bvh().intersect_any(&ray, 0.0, f64::INFINITY) {
                            continue;
                        }
                        let scale = cos / (PI * es.pdf);
                        for ch in 0..3 {
                            let mut v = es.radiance[ch] * scale;
                            if let Some(clamp) = cfg.clamp_radiance {
                                v = v.min(clamp);
                            }
                            acc[ch] += v;
                        }
                    }
                    row[x] = [
                        acc[0] / spp as f64,
                        acc[1] / spp as f64,
                        acc[2] / spp as f64,
                    ];
                }
                row
            })
            .collect();

        for (y, row) in rows.into_iter().enumerate() {
            g.shading[y * w..(y + 1) * w].copy_from_slice(&row);
        }
        Ok(())
    }
}

/// Geometry plus shading for a face mesh, which skips smoothing and shares
/// the body camera so the planes stay pixel-aligned with the body raster.
pub fn render_face_pass(
    face_mesh: &TriangleMesh,
    cam: &OrthoCamera,
    sampler: &EnvSampler,
    cfg: &RenderConfig,
) -> Result<GBuffer> {
    let scene = Scene::new(face_mesh.clone())?;
    let mut g = scene.render_geometry(cam, cfg)?;
    scene.render_shading(cam, sampler, cfg, &mut g)?;
    Ok(g)
}
