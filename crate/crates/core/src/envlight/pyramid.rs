//! Gaussian-pyramid reduction for environment maps.
//!
//! Each level halves both dimensions with the separable 5-tap binomial
//! kernel [1 4 6 4 1]/16, wrapping in azimuth and clamping at the poles.

use crate::envlight::EnvironmentMap;
use crate::error::{CoreError, Result};

const KERNEL: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// Repeatedly halves `map` until it reaches `target_w` x `target_h`.
/// Both dimensions must exceed the target by the same power of two.
pub fn downsample_pyramid(
    map: &EnvironmentMap,
    target_w: usize,
    target_h: usize,
) -> Result<EnvironmentMap> {
    if target_w < 2 || target_h < 1 {
        return Err(CoreError::Shape(format!("target {target_w}x{target_h} too small")));
    }
    let (w, h) = (map.width(), map.height());
    if w % target_w != 0 || h % target_h != 0 {
        return Err(shape_error(w, h, target_w, target_h));
    }
    let ratio = w / target_w;
    if ratio != h / target_h || !ratio.is_power_of_two() {
        return Err(shape_error(w, h, target_w, target_h));
    }

    let mut current = map.clone();
    while current.width() > target_w {
        current = reduce_once(&current)?;
    }
    Ok(current)
}

fn shape_error(w: usize, h: usize, tw: usize, th: usize) -> CoreError {
    CoreError::Shape(format!(
        "{w}x{h} is not {tw}x{th} scaled by a common power of two"
    ))
}

/// One pyramid level: blur with the binomial kernel and decimate by two.
/// Output pixel (r, c) gathers input taps centred on (2r, 2c).
fn reduce_once(map: &EnvironmentMap) -> Result<EnvironmentMap> {
    let (w, h) = (map.width(), map.height());
    let (ow, oh) = (w / 2, h / 2);

    // Horizontal pass with wraparound, at full resolution.
    let mut horiz = vec![[0.0f64; 3]; w * h];
    for row in 0..h {
        for col in 0..w {
            let mut acc = [0.0f64; 3];
            for (k, &kw) in KERNEL.iter().enumerate() {
                let src = (col as i64 + k as i64 - 2).rem_euclid(w as i64) as usize;
                let px = map.at(row, src);
                for ch in 0..3 {
                    acc[ch] += kw * px[ch];
                }
            }
            horiz[row * w + col] = acc;
        }
    }

    // Vertical pass with clamping, sampled at the decimated grid.
    let mut out = Vec::with_capacity(ow * oh);
    for row in 0..oh {
        for col in 0..ow {
            let mut acc = [0.0f64; 3];
            for (k, &kw) in KERNEL.iter().enumerate() {
                let src = (2 * row as i64 + k as i64 - 2).clamp(0, h as i64 - 1) as usize;
                let px = horiz[src * w + 2 * col];
                for ch in 0..3 {
                    acc[ch] += kw * px[ch];
                }
            }
            // The kernel is non-negative, so this only clips roundoff dust.
            out.push([acc[0].max(0.0), acc[1].max(0.0), acc[2].max(0.0)]);
        }
    }
    EnvironmentMap::new(ow, oh, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_map_stays_constant() {
        let map = EnvironmentMap::constant(64, 32, [0.4, 1.7, 0.09]).unwrap();
        let out = downsample_pyramid(&map, 8, 4).unwrap();
        assert_eq!(out.width(), 8);
        assert_eq!(out.height(), 4);
        for px in out.texels() {
            assert!((px[0] - 0.4).abs() < 1e-12);
            assert!((px[1] - 1.7).abs() < 1e-12);
            assert!((px[2] - 0.09).abs() < 1e-12);
        }
    }

    #[test]
    fn four_levels_hit_paper_grid() {
        let map = EnvironmentMap::constant(512, 256, [1.0; 3]).unwrap();
        let out = downsample_pyramid(&map, 32, 16).unwrap();
        assert_eq!((out.width(), out.height()), (32, 16));
    }

    #[test]
    fn commutes_with_coarse_integer_rotations() {
        // Rotating by whole coarse pixels before or after reduction gives
        // bit-identical texels: integer shifts permute the wrapped
        // horizontal convolution exactly.
        let (w, h, tw, th) = (64usize, 32usize, 8usize, 4usize);
        let mut radiance = Vec::with_capacity(w * h);
        for i in 0..w * h {
            let v = i as f64;
            radiance.push([v * 0.5, (v * 0.173).sin().abs(), 3.0 / (v + 1.0)]);
        }
        let map = EnvironmentMap::new(w, h, radiance).unwrap();
        // Three coarse pixels = 24 fine columns.
        let degrees = 360.0 * 3.0 / tw as f64;
        let rotate_then_reduce =
            downsample_pyramid(&map.rotate_yaw(degrees), tw, th).unwrap();
        let reduce_then_rotate =
            downsample_pyramid(&map, tw, th).unwrap().rotate_yaw(degrees);
        assert_eq!(rotate_then_reduce.texels(), reduce_then_rotate.texels());
    }

    #[test]
    fn rejects_non_power_of_two_ratio() {
        let map = EnvironmentMap::constant(48, 24, [1.0; 3]).unwrap();
        assert!(matches!(downsample_pyramid(&map, 32, 16), Err(CoreError::Shape(_))));
        let map = EnvironmentMap::constant(64, 16, [1.0; 3]).unwrap();
        assert!(matches!(downsample_pyramid(&map, 32, 16), Err(CoreError::Shape(_))));
    }

    #[test]
    fn impulse_energy_preserved_and_matches_direct_convolution() {
        let w = 64;
        let h = 32;
        let mut radiance = vec![[0.0f64; 3]; w * h];
        radiance[17 * w + 30] = [16.0, 8.0, 4.0];
        let map = EnvironmentMap::new(w, h, radiance).unwrap();
        let out = downsample_pyramid(&map, w / 2, h / 2).unwrap();

        // Direct (non-separable) convolution oracle.
        let kernel2d: Vec<Vec<f64>> = KERNEL
            .iter()
            .map(|a| KERNEL.iter().map(|b| a * b).collect())
            .collect();
        for orow in 0..h / 2 {
            for ocol in 0..w / 2 {
                let mut expect = [0.0f64; 3];
                for (i, krow) in kernel2d.iter().enumerate() {
                    for (j, &kw) in krow.iter().enumerate() {
                        let r = (2 * orow as i64 + i as i64 - 2).clamp(0, h as i64 - 1) as usize;
                        let c = (2 * ocol as i64 + j as i64 - 2).rem_euclid(w as i64) as usize;
                        let px = map.at(r, c);
                        for ch in 0..3 {
                            expect[ch] += kw * px[ch];
                        }
                    }
                }
                let got = out.at(orow, ocol);
                for ch in 0..3 {
                    assert!((got[ch] - expect[ch]).abs() < 1e-12);
                }
            }
        }

        // One level keeps a quarter of the samples, so sum * 4 approximates
        // the input sum (the impulse sits away from the pole clamp).
        let sum_in: f64 = map.texels().iter().map(|p| p[0]).sum();
        let sum_out: f64 = out.texels().iter().map(|p| p[0]).sum();
        assert!(
            (sum_out * 4.0 - sum_in).abs() / sum_in < 0.02,
            "energy ratio {}",
            sum_out * 4.0 / sum_in
        );
    }
}
