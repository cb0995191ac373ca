//! Image and lighting evaluation metrics: foreground MSE/PSNR/SSIM, an
//! FFT-domain L1 distance and the solid-angle-weighted log-L2 light loss.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::compose::{ImageRGB, Mask};
use crate::envlight::{downsample_pyramid, solid_angle_weights, EnvironmentMap};
use crate::error::{CoreError, Result};

/// PSNR cap reported when the MSE is effectively zero.
pub const PSNR_CAP_DB: f64 = 99.0;

/// Summary emitted by the `compare` interface. MSE is reported scaled by
/// 10^3.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub mse_scaled: f64,
    pub psnr: f64,
    pub ssim: f64,
    pub pixel_count: usize,
}

fn check_dims(a: &ImageRGB, b: &ImageRGB, mask: Option<&Mask>) -> Result<()> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(CoreError::Shape(format!(
            "image dimensions differ: {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    if let Some(m) = mask {
        if (m.width(), m.height()) != (a.width(), a.height()) {
            return Err(CoreError::Shape("mask dimensions differ from images".into()));
        }
    }
    Ok(())
}

/// Clamps to [0, 1] for metric purposes, warning once per image when values
/// fall outside the expected range.
fn clamped(img: &ImageRGB, label: &str) -> Vec<[f64; 3]> {
    let mut clipped = 0usize;
    let data = img
        .pixels()
        .iter()
        .map(|px| {
            px.map(|v| {
                if !(0.0..=1.0).contains(&v) {
                    clipped += 1;
                }
                v.clamp(0.0, 1.0)
            })
        })
        .collect();
    if clipped > 0 {
        log::warn!("{label}: {clipped} channel values clamped to [0, 1] for metrics");
    }
    data
}

/// Mean squared error over the masked foreground and all three channels,
/// reported as (MSE * 10^3, PSNR dB). PSNR is capped at 99 dB when the MSE
/// drops below 1e-10.
pub fn mse_psnr(a: &ImageRGB, b: &ImageRGB, mask: Option<&Mask>) -> Result<(f64, f64)> {
    check_dims(a, b, mask)?;
    let pa = clamped(a, "mse a");
    let pb = clamped(b, "mse b");
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for i in 0..pa.len() {
        if mask.map_or(true, |m| m.data()[i]) {
            for ch in 0..3 {
                let d = pa[i][ch] - pb[i][ch];
                sum += d * d;
            }
            count += 1;
        }
    }
    if count == 0 {
        return Err(CoreError::DegenerateInput("empty mask for mse/psnr".into()));
    }
    let mse = sum / (count * 3) as f64;
    let psnr = if mse < 1e-10 { PSNR_CAP_DB } else { 10.0 * (1.0 / mse).log10() };
    Ok((mse * 1e3, psnr))
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

fn gaussian_kernel() -> [f64; SSIM_WINDOW] {
    let mut k = [0.0f64; SSIM_WINDOW];
    let half = (SSIM_WINDOW / 2) as f64;
    let mut sum = 0.0;
    for (i, v) in k.iter_mut().enumerate() {
        *v = (-((i as f64 - half).powi(2)) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        sum += *v;
    }
    for v in &mut k {
        *v /= sum;
    }
    k
}

/// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), dynamic range 1,
/// averaged over channels and over windows whose center pixel is in the
/// mask. Windows clipped by the image border renormalize over the
/// available pixels.
pub fn ssim(a: &ImageRGB, b: &ImageRGB, mask: Option<&Mask>) -> Result<f64> {
    check_dims(a, b, mask)?;
    let pa = clamped(a, "ssim a");
    let pb = clamped(b, "ssim b");
    let (w, h) = (a.width() as i64, a.height() as i64);
    let kernel = gaussian_kernel();
    let half = (SSIM_WINDOW / 2) as i64;
    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;

    let mut total = 0.0f64;
    let mut count = 0usize;
    for row in 0..h {
        for col in 0..w {
            let center = (row * w + col) as usize;
            if !mask.map_or(true, |m| m.data()[center]) {
                continue;
            }
            for ch in 0..3 {
                let mut wsum = 0.0;
                let (mut sa, mut sb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for dy in -half..=half {
                    let r = row + dy;
                    if r < 0 || r >= h {
                        continue;
                    }
                    let ky = kernel[(dy + half) as usize];
                    for dx in -half..=half {
                        let c = col + dx;
                        if c < 0 || c >= w {
                            continue;
                        }
                        let wgt = ky * kernel[(dx + half) as usize];
                        let idx = (r * w + c) as usize;
                        let va = pa[idx][ch];
                        let vb = pb[idx][ch];
                        wsum += wgt;
                        sa += wgt * va;
                        sb += wgt * vb;
                        saa += wgt * va * va;
                        sbb += wgt * vb * vb;
                        sab += wgt * va * vb;
                    }
                }
                let mu_a = sa / wsum;
                let mu_b = sb / wsum;
                let var_a = saa / wsum - mu_a * mu_a;
                let var_b = sbb / wsum - mu_b * mu_b;
                let cov = sab / wsum - mu_a * mu_b;
                let value = ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
                    / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
                total += value;
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(CoreError::DegenerateInput("empty mask for ssim".into()));
    }
    Ok(total / count as f64)
}

/// Which FFT residual the distance is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FftMode {
    /// L1 over real and imaginary parts of F(a) - F(b); shift sensitive.
    #[default]
    Complex,
    /// L1 over |F(a)| - |F(b)|; invariant to circular shifts.
    Magnitude,
}

/// Unnormalized forward 2D FFT of one channel, rows then columns.
pub fn fft2(data: &[[f64; 3]], width: usize, height: usize, channel: usize) -> Vec<Complex<f64>> {
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_forward(width);
    let col_fft = planner.plan_fft_forward(height);

    let mut grid: Vec<Complex<f64>> =
        data.iter().map(|px| Complex::new(px[channel], 0.0)).collect();
    for row in grid.chunks_mut(width) {
        row_fft.process(row);
    }
    let mut column = vec![Complex::default(); height];
    for c in 0..width {
        for r in 0..height {
            column[r] = grid[r * width + c];
        }
        col_fft.process(&mut column);
        for r in 0..height {
            grid[r * width + c] = column[r];
        }
    }
    grid
}

/// Mean absolute FFT residual between two images, averaged over all
/// frequency bins and channels.
pub fn fft_l1(a: &ImageRGB, b: &ImageRGB) -> Result<f64> {
    fft_l1_with(a, b, FftMode::Complex)
}

pub fn fft_l1_with(a: &ImageRGB, b: &ImageRGB, mode: FftMode) -> Result<f64> {
    check_dims(a, b, None)?;
    let (w, h) = (a.width(), a.height());
    let mut sum = 0.0f64;
    for ch in 0..3 {
        let fa = fft2(a.pixels(), w, h, ch);
        let fb = fft2(b.pixels(), w, h, ch);
        for (va, vb) in fa.iter().zip(&fb) {
            sum += match mode {
                FftMode::Complex => (va.re - vb.re).abs() + (va.im - vb.im).abs(),
                FftMode::Magnitude => (va.norm() - vb.norm()).abs(),
            };
        }
    }
    Ok(sum / (w * h * 3) as f64)
}

/// Weight placement for the light loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LightLossForm {
    /// `sum w * (log(1+est) - log(1+gt))^2`; symmetric in the inputs.
    #[default]
    SymmetricWeighted,
    /// `sum (w * log(1+est) - log(1+gt))^2`, the asymmetric form with the
    /// weight on the estimate only.
    Asymmetric,
}

/// Grid both maps are reduced to before the loss (width, height).
pub const LIGHT_LOSS_GRID: (usize, usize) = (32, 16);

/// Solid-angle-weighted log-L2 distance between two environment maps, after
/// pyramid reduction of both to the 32x16 grid. Natural log; summed over
/// pixels and channels.
pub fn light_loss(est: &EnvironmentMap, gt: &EnvironmentMap) -> Result<f64> {
    light_loss_with(est, gt, LightLossForm::SymmetricWeighted)
}

pub fn light_loss_with(
    est: &EnvironmentMap,
    gt: &EnvironmentMap,
    form: LightLossForm,
) -> Result<f64> {
    let (gw, gh) = LIGHT_LOSS_GRID;
    let est = downsample_pyramid(est, gw, gh)?;
    let gt = downsample_pyramid(gt, gw, gh)?;
    let weights = solid_angle_weights(gw, gh);
    let mut loss = 0.0f64;
    for row in 0..gh {
        let w = weights.row_weight(row);
        for col in 0..gw {
            let pe = est.at(row, col);
            let pg = gt.at(row, col);
            for ch in 0..3 {
                let le = (1.0 + pe[ch]).ln();
                let lg = (1.0 + pg[ch]).ln();
                let d = match form {
                    LightLossForm::SymmetricWeighted => {
                        let d = le - lg;
                        w * d * d
                    }
                    LightLossForm::Asymmetric => {
                        let d = w * le - lg;
                        d * d
                    }
                };
                loss += d;
            }
        }
    }
    Ok(loss)
}

/// Total solid angle of the light-loss grid (4*pi), exposed for closed-form
/// checks against the loss.
pub fn light_loss_total_weight() -> f64 {
    4.0 * PI
}
