//! Luminance-proportional importance sampling of environment maps.
//!
//! Rows are selected through a marginal CDF of luminance * solid angle,
//! columns through per-row conditional CDFs; the fractional remainders of
//! both inversions place the direction uniformly inside the chosen texel's
//! solid angle (uniform in azimuth and in cos theta). The pdf is therefore
//! piecewise constant: prob(pixel) / solid_angle(pixel), in 1/steradian.

use std::f64::consts::{PI, TAU};

use crate::envlight::{solid_angle_weights, EnvironmentMap};
use crate::error::{CoreError, Result};
use crate::math::Vec3;

/// One importance-sampled light direction.
#[derive(Debug, Clone, Copy)]
pub struct EnvSample {
    pub direction: Vec3,
    /// Probability density in 1/steradian; positive wherever radiance is.
    pub pdf: f64,
    /// Radiance of the sampled texel (the map is piecewise constant).
    pub radiance: [f64; 3],
}

/// Immutable sampling tables for one environment map.
#[derive(Debug, Clone)]
pub struct EnvSampler {
    width: usize,
    height: usize,
    /// Marginal row CDF; len height, last entry exactly 1.
    row_cdf: Vec<f64>,
    /// Conditional column CDFs, one slice of `width` per row; each row's
    /// last entry is 1 unless the row is black.
    col_cdf: Vec<f64>,
    prob: Vec<f64>,
    pdf_sr: Vec<f64>,
    radiance: Vec<[f64; 3]>,
    /// cos(theta) at each row's top edge; len height + 1, descending.
    row_cos: Vec<f64>,
}

impl EnvSampler {
    pub fn build(map: &EnvironmentMap) -> Result<EnvSampler> {
        let (w, h) = (map.width(), map.height());
        let weights = solid_angle_weights(w, h);

        let mut row_sums = vec![0.0f64; h];
        let mut importance = vec![0.0f64; w * h];
        let mut total = 0.0f64;
        for row in 0..h {
            let sa = weights.row_weight(row);
            for col in 0..w {
                let lw = map.luminance(row, col) * sa;
                importance[row * w + col] = lw;
                row_sums[row] += lw;
            }
            total += row_sums[row];
        }
        if total <= 0.0 {
            return Err(CoreError::DegenerateInput(
                "environment map has no positive luminance".into(),
            ));
        }

        let mut row_cdf = Vec::with_capacity(h);
        let mut running = 0.0f64;
        for row in 0..h {
            running += row_sums[row] / total;
            row_cdf.push(running);
        }
        *row_cdf.last_mut().unwrap() = 1.0;

        let mut col_cdf = vec![0.0f64; w * h];
        let mut prob = vec![0.0f64; w * h];
        let mut pdf_sr = vec![0.0f64; w * h];
        for row in 0..h {
            let mut acc = 0.0f64;
            for col in 0..w {
                let lw = importance[row * w + col];
                if row_sums[row] > 0.0 {
                    acc += lw / row_sums[row];
                }
                col_cdf[row * w + col] = acc;
                let p = lw / total;
                prob[row * w + col] = p;
                pdf_sr[row * w + col] = p / weights.row_weight(row);
            }
            if row_sums[row] > 0.0 {
                col_cdf[row * w + w - 1] = 1.0;
            }
        }

        let row_cos = (0..=h).map(|r| (PI * r as f64 / h as f64).cos()).collect();
        Ok(EnvSampler {
            width: w,
            height: h,
            row_cdf,
            col_cdf,
            prob,
            pdf_sr,
            radiance: map.texels().to_vec(),
            row_cos,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Selection probability of a pixel (dimensionless; sums to 1).
    pub fn pixel_probability(&self, row: usize, col: usize) -> f64 {
        self.prob[row * self.width + col]
    }

    /// Per-steradian pdf of directions inside a pixel.
    pub fn pixel_pdf(&self, row: usize, col: usize) -> f64 {
        self.pdf_sr[row * self.width + col]
    }

    /// Draws a direction from two uniforms in [0, 1): `u_row` inverts the
    /// marginal row CDF, `u_col` the conditional column CDF. The fractional
    /// positions inside the chosen CDF segments jitter the direction
    /// uniformly over the texel's solid angle.
    pub fn sample(&self, u_row: f64, u_col: f64) -> EnvSample {
        let row = self.row_cdf.partition_point(|&c| c <= u_row).min(self.height - 1);
        let lo = if row == 0 { 0.0 } else { self.row_cdf[row - 1] };
        let span = self.row_cdf[row] - lo;
        let frac_row = if span > 0.0 { ((u_row - lo) / span).clamp(0.0, 1.0) } else { 0.5 };

        let cols = &self.col_cdf[row * self.width..(row + 1) * self.width];
        let col = cols.partition_point(|&c| c <= u_col).min(self.width - 1);
        let clo = if col == 0 { 0.0 } else { cols[col - 1] };
        let cspan = cols[col] - clo;
        let frac_col = if cspan > 0.0 { ((u_col - clo) / cspan).clamp(0.0, 1.0) } else { 0.5 };

        let phi = TAU * (col as f64 + frac_col) / self.width as f64;
        let cos_top = self.row_cos[row];
        let cos_bottom = self.row_cos[row + 1];
        let y = cos_top + (cos_bottom - cos_top) * frac_row;
        let sin_theta = (1.0 - y * y).max(0.0).sqrt();
        let (sp, cp) = phi.sin_cos();

        let idx = row * self.width + col;
        EnvSample {
            direction: Vec3::new(sin_theta * cp, y, sin_theta * sp),
            pdf: self.pdf_sr[idx],
            radiance: self.radiance[idx],
        }
    }
}
