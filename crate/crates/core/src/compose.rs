//! Relit-output assembly: albedo times shading, face-region compositing,
//! shading normalization and environment-map background substitution.

use std::f64::consts::PI;

use crate::envlight::EnvironmentMap;
use crate::error::{CoreError, Result};
use crate::math::Vec3;

/// Linear RGB image with an optional alpha/mask plane in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRGB {
    width: usize,
    height: usize,
    data: Vec<[f64; 3]>,
    mask: Option<Vec<f64>>,
}

impl ImageRGB {
    pub fn new(width: usize, height: usize, data: Vec<[f64; 3]>) -> Result<ImageRGB> {
        if data.len() != width * height {
            return Err(CoreError::Shape(format!(
                "{} pixels for a {width}x{height} image",
                data.len()
            )));
        }
        for (i, px) in data.iter().enumerate() {
            if px.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(CoreError::Numerical(format!(
                    "pixel {i} is negative or non-finite"
                )));
            }
        }
        Ok(ImageRGB { width, height, data, mask: None })
    }

    pub fn constant(width: usize, height: usize, value: [f64; 3]) -> Result<ImageRGB> {
        ImageRGB::new(width, height, vec![value; width * height])
    }

    pub fn with_mask(mut self, mask: Vec<f64>) -> Result<ImageRGB> {
        if mask.len() != self.width * self.height {
            return Err(CoreError::Shape("mask dimensions differ from image".into()));
        }
        if mask.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return Err(CoreError::Numerical("mask values must lie in [0, 1]".into()));
        }
        self.mask = Some(mask);
        Ok(self)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.data
    }

    pub fn mask(&self) -> Option<&[f64]> {
        self.mask.as_deref()
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> [f64; 3] {
        self.data[row * self.width + col]
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().flatten().fold(0.0f64, |a, &v| a.max(v))
    }
}

/// Binary foreground mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Mask> {
        if data.len() != width * height {
            return Err(CoreError::Shape("mask buffer does not match dimensions".into()));
        }
        Ok(Mask { width, height, data })
    }

    pub fn full(width: usize, height: usize) -> Mask {
        Mask { width, height, data: vec![true; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row * self.width + col]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&m| m).count()
    }
}

/// Rectangular compositing window in body-raster pixels with a feather band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSpec {
    pub row0: usize,
    pub col0: usize,
    pub rows: usize,
    pub cols: usize,
    /// Feather band width in pixels; 0 is a hard edge.
    pub feather: usize,
}

impl RegionSpec {
    pub fn validate(&self, raster_w: usize, raster_h: usize) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(CoreError::Shape("region must be non-empty".into()));
        }
        if self.row0 + self.rows > raster_h || self.col0 + self.cols > raster_w {
            return Err(CoreError::Shape(format!(
                "region {}x{} at ({}, {}) exceeds {raster_w}x{raster_h} raster",
                self.rows, self.cols, self.row0, self.col0
            )));
        }
        if self.feather * 2 >= self.rows.min(self.cols) {
            return Err(CoreError::Shape("feather wider than half the region".into()));
        }
        Ok(())
    }
}

/// Per-pixel, per-channel product `albedo * shading`; the relit image.
/// Carries the albedo's mask when present.
pub fn compose_relit(albedo: &ImageRGB, shading: &ImageRGB) -> Result<ImageRGB> {
    if (albedo.width, albedo.height) != (shading.width, shading.height) {
        return Err(CoreError::Shape(format!(
            "albedo {}x{} vs shading {}x{}",
            albedo.width, albedo.height, shading.width, shading.height
        )));
    }
    let data = albedo
        .data
        .iter()
        .zip(&shading.data)
        .map(|(a, s)| [a[0] * s[0], a[1] * s[1], a[2] * s[2]])
        .collect();
    let out = ImageRGB::new(albedo.width, albedo.height, data)?;
    match &albedo.mask {
        Some(m) => out.with_mask(m.clone()),
        None => Ok(out),
    }
}

/// Blend weight of the patch at distance-to-region-border `d` (pixels).
fn feather_weight(d: usize, feather: usize) -> f64 {
    if feather == 0 {
        1.0
    } else {
        ((d as f64 + 0.5) / feather as f64).min(1.0)
    }
}

/// Pastes `patch` over `body` inside `region`. Pixels deeper than the
/// feather band take the patch; the band ramps linearly from the border.
pub fn composite_region(
    body: &ImageRGB,
    patch: &ImageRGB,
    region: &RegionSpec,
) -> Result<ImageRGB> {
    region.validate(body.width, body.height)?;
    if (patch.width, patch.height) != (region.cols, region.rows) {
        return Err(CoreError::Shape(format!(
            "patch {}x{} vs region {}x{}",
            patch.width, patch.height, region.cols, region.rows
        )));
    }
    let mut out = body.clone();
    for pr in 0..region.rows {
        for pc in 0..region.cols {
            let d = pr
                .min(region.rows - 1 - pr)
                .min(pc)
                .min(region.cols - 1 - pc);
            let w = feather_weight(d, region.feather);
            let idx = (region.row0 + pr) * body.width + (region.col0 + pc);
            let p = patch.data[pr * patch.width + pc];
            let b = body.data[idx];
            out.data[idx] = [
                w * p[0] + (1.0 - w) * b[0],
                w * p[1] + (1.0 - w) * b[1],
                w * p[2] + (1.0 - w) * b[2],
            ];
        }
    }
    Ok(out)
}

/// Rescales so the global maximum becomes exactly 1, preserving channel
/// ratios and the argmax location.
pub fn normalize_shading(shading: &ImageRGB) -> Result<ImageRGB> {
    let max = shading.max_value();
    if max <= 0.0 {
        return Err(CoreError::DegenerateInput("all-zero shading cannot be normalized".into()));
    }
    let data = shading
        .data
        .iter()
        .map(|px| [px[0] / max, px[1] / max, px[2] / max])
        .collect();
    let out = ImageRGB::new(shading.width, shading.height, data)?;
    match &shading.mask {
        Some(m) => out.with_mask(m.clone()),
        None => Ok(out),
    }
}

/// Replaces background pixels (mask < 1) with a pinhole-projected crop of
/// the environment map looking toward `azimuth` (radians, measured like the
/// map's phi) with the given vertical field of view. The foreground is
/// alpha-blended by the mask. The crop is pinhole despite the orthographic
/// foreground camera; a true orthographic background would collapse to a
/// single color.
pub fn composite_background(
    relit: &ImageRGB,
    env: &EnvironmentMap,
    azimuth: f64,
    vertical_fov: f64,
) -> Result<ImageRGB> {
    let mask = relit
        .mask
        .as_ref()
        .ok_or_else(|| CoreError::Precondition("background compositing needs a mask".into()))?;
    if !(vertical_fov > 0.0 && vertical_fov < PI) {
        return Err(CoreError::Precondition(format!(
            "vertical fov must lie in (0, pi), got {vertical_fov}"
        )));
    }

    let (w, h) = (relit.width, relit.height);
    let forward = Vec3::new(azimuth.cos(), 0.0, azimuth.sin());
    let up = Vec3::Y;
    let right = Vec3::new(-azimuth.sin(), 0.0, azimuth.cos());
    let tan_v = (vertical_fov / 2.0).tan();
    let tan_h = tan_v * w as f64 / h as f64;

    let mut data = Vec::with_capacity(w * h);
    for row in 0..h {
        for col in 0..w {
            let idx = row * w + col;
            let a = mask[idx];
            let fg = relit.data[idx];
            if a >= 1.0 {
                data.push(fg);
                continue;
            }
            let sx = 2.0 * (col as f64 + 0.5) / w as f64 - 1.0;
            let sy = 1.0 - 2.0 * (row as f64 + 0.5) / h as f64;
            let dir = (forward + right * (sx * tan_h) + up * (sy * tan_v)).normalized();
            let bg = env.sample_bilinear(dir);
            data.push([
                a * fg[0] + (1.0 - a) * bg[0],
                a * fg[1] + (1.0 - a) * bg[1],
                a * fg[2] + (1.0 - a) * bg[2],
            ]);
        }
    }
    let out = ImageRGB::new(w, h, data)?;
    out.with_mask(mask.clone())
}
