//! Equirectangular HDR environment maps and everything derived from them:
//! directions, solid angles, yaw rotation, Gaussian-pyramid downsampling,
//! spherical-harmonics projection/shading and luminance importance sampling.
//!
//! Lat-long convention, shared by every operation here: +Y is up, row 0 is
//! the north pole, theta = pi*(row+0.5)/H measured from +Y, and
//! phi = 2*pi*(col+0.5)/W measured from +X toward +Z. A pixel (row, col)
//! maps to the direction (sin t cos p, cos t, sin t sin p).

mod pyramid;
mod sampler;
mod sh;

pub use pyramid::downsample_pyramid;
pub use sampler::{EnvSample, EnvSampler};
pub use sh::{eval_sh_basis, sh_irradiance_shading, sh_project, SHCoefficients};

use std::f64::consts::{PI, TAU};

use crate::error::{CoreError, Result};
use crate::math::Vec3;

/// Equirectangular panorama of linear RGB radiance, row-major, row 0 at the
/// north pole. Values are finite and non-negative but unbounded above.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentMap {
    width: usize,
    height: usize,
    radiance: Vec<[f64; 3]>,
}

impl EnvironmentMap {
    pub fn new(width: usize, height: usize, radiance: Vec<[f64; 3]>) -> Result<EnvironmentMap> {
        if width < 2 || height < 1 {
            return Err(CoreError::Shape(format!(
                "environment map must be at least 2x1, got {width}x{height}"
            )));
        }
        if radiance.len() != width * height {
            return Err(CoreError::Shape(format!(
                "{} texels for a {width}x{height} map",
                radiance.len()
            )));
        }
        for (i, px) in radiance.iter().enumerate() {
            if px.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(CoreError::Numerical(format!(
                    "texel {i} is negative or non-finite"
                )));
            }
        }
        Ok(EnvironmentMap { width, height, radiance })
    }

    /// Constant-radiance map, handy for tests and baselines.
    pub fn constant(width: usize, height: usize, value: [f64; 3]) -> Result<EnvironmentMap> {
        EnvironmentMap::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn texels(&self) -> &[[f64; 3]] {
        &self.radiance
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> [f64; 3] {
        self.radiance[row * self.width + col]
    }

    /// Rec. 709 luminance of a texel.
    #[inline]
    pub fn luminance(&self, row: usize, col: usize) -> f64 {
        let [r, g, b] = self.at(row, col);
        0.2126 * r + 0.7152 * g + 0.0722 * b
    }

    /// Direction through a pixel at the given in-pixel offset (0.5, 0.5 is
    /// the pixel center). Returns a unit vector.
    pub fn direction_from_pixel(
        &self,
        row: usize,
        col: usize,
        offset: (f64, f64),
    ) -> Result<Vec3> {
        if row >= self.height || col >= self.width {
            return Err(CoreError::Bounds(format!(
                "pixel ({row}, {col}) outside {}x{} map",
                self.width, self.height
            )));
        }
        Ok(direction_for(self.width, self.height, row as f64 + offset.0, col as f64 + offset.1))
    }

    /// Pixel containing the given direction.
    pub fn pixel_from_direction(&self, dir: Vec3) -> (usize, usize) {
        let d = dir.normalized();
        let theta = d.y.clamp(-1.0, 1.0).acos();
        let phi = d.z.atan2(d.x).rem_euclid(TAU);
        let row = ((theta / PI) * self.height as f64) as usize;
        let col = ((phi / TAU) * self.width as f64) as usize;
        (row.min(self.height - 1), col.min(self.width - 1))
    }

    /// Nearest-texel lookup by direction.
    pub fn sample_nearest(&self, dir: Vec3) -> [f64; 3] {
        let (row, col) = self.pixel_from_direction(dir);
        self.at(row, col)
    }

    /// Bilinear lookup by direction, wrapping in azimuth and clamping at the
    /// poles.
    pub fn sample_bilinear(&self, dir: Vec3) -> [f64; 3] {
        let d = dir.normalized();
        let theta = d.y.clamp(-1.0, 1.0).acos();
        let phi = d.z.atan2(d.x).rem_euclid(TAU);
        let x = (phi / TAU) * self.width as f64 - 0.5;
        let y = (theta / PI) * self.height as f64 - 0.5;

        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let c0 = (x0 as i64).rem_euclid(self.width as i64) as usize;
        let c1 = (c0 + 1) % self.width;
        let r0 = (y0 as i64).clamp(0, self.height as i64 - 1) as usize;
        let r1 = ((y0 as i64) + 1).clamp(0, self.height as i64 - 1) as usize;

        let mut out = [0.0; 3];
        for ch in 0..3 {
            let top = self.at(r0, c0)[ch] * (1.0 - fx) + self.at(r0, c1)[ch] * fx;
            let bot = self.at(r1, c0)[ch] * (1.0 - fx) + self.at(r1, c1)[ch] * fx;
            out[ch] = top * (1.0 - fy) + bot * fy;
        }
        out
    }

    /// Rotates the map about the vertical axis. Positive angles move content
    /// toward increasing azimuth (increasing column, wrapping around).
    /// Integer column shifts are exact permutations; fractional shifts use
    /// linear interpolation.
    pub fn rotate_yaw(&self, degrees: f64) -> EnvironmentMap {
        let shift = self.width as f64 * degrees / 360.0;
        let rounded = shift.round();
        let w = self.width as i64;

        let mut out = Vec::with_capacity(self.radiance.len());
        if (shift - rounded).abs() < 1e-9 {
            let s = (rounded as i64).rem_euclid(w);
            for row in 0..self.height {
                for col in 0..self.width {
                    let src = (col as i64 - s).rem_euclid(w) as usize;
                    out.push(self.at(row, src));
                }
            }
        } else {
            for row in 0..self.height {
                for col in 0..self.width {
                    let x = (col as f64 - shift).rem_euclid(self.width as f64);
                    let c0 = x.floor() as usize % self.width;
                    let c1 = (c0 + 1) % self.width;
                    let f = x - x.floor();
                    let a = self.at(row, c0);
                    let b = self.at(row, c1);
                    out.push([
                        a[0] * (1.0 - f) + b[0] * f,
                        a[1] * (1.0 - f) + b[1] * f,
                        a[2] * (1.0 - f) + b[2] * f,
                    ]);
                }
            }
        }
        EnvironmentMap { width: self.width, height: self.height, radiance: out }
    }

    /// Per-texel scaling, e.g. for exposure sweeps.
    pub fn scaled(&self, factor: f64) -> Result<EnvironmentMap> {
        let radiance = self
            .radiance
            .iter()
            .map(|px| [px[0] * factor, px[1] * factor, px[2] * factor])
            .collect();
        EnvironmentMap::new(self.width, self.height, radiance)
    }
}

/// Direction for continuous pixel coordinates (`frow` in [0, H], `fcol`
/// wrapping modulo W) under the module's lat-long convention.
pub fn direction_for(width: usize, height: usize, frow: f64, fcol: f64) -> Vec3 {
    let theta = PI * frow / height as f64;
    let phi = TAU * fcol / width as f64;
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(st * cp, ct, st * sp)
}

/// Steradian area subtended by each texel of a W x H lat-long grid. Rows
/// share a single value; the total is exactly 4*pi up to roundoff.
#[derive(Debug, Clone)]
pub struct SolidAngleWeights {
    width: usize,
    height: usize,
    row_weights: Vec<f64>,
}

impl SolidAngleWeights {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn weight(&self, row: usize, _col: usize) -> f64 {
        self.row_weights[row]
    }

    #[inline]
    pub fn row_weight(&self, row: usize) -> f64 {
        self.row_weights[row]
    }

    pub fn total(&self) -> f64 {
        self.row_weights.iter().sum::<f64>() * self.width as f64
    }
}

/// Solid angle of each texel: `(2*pi/W) * (cos(theta_top) - cos(theta_bottom))`
/// per row, constant along the row.
pub fn solid_angle_weights(width: usize, height: usize) -> SolidAngleWeights {
    assert!(width >= 2 && height >= 1, "weights need at least a 2x1 grid");
    let row_weights = (0..height)
        .map(|row| {
            let top = PI * row as f64 / height as f64;
            let bottom = PI * (row + 1) as f64 / height as f64;
            (TAU / width as f64) * (top.cos() - bottom.cos())
        })
        .collect();
    SolidAngleWeights { width, height, row_weights }
}
