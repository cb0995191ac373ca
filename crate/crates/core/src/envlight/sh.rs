//! Real spherical harmonics: basis evaluation, environment projection and
//! Lambertian irradiance shading.
//!
//! The basis is the real, orthonormal graphics convention without the
//! Condon-Shortley phase: all polynomial signs positive, so e.g.
//! Y(1,1) = +0.488603 * x. Coefficients are indexed l*(l+1) + m.

use std::f64::consts::PI;

use crate::envlight::{solid_angle_weights, EnvironmentMap};
use crate::error::{CoreError, Result};
use crate::math::Vec3;

/// Per-channel SH radiance coefficients up to band `order` inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct SHCoefficients {
    order: usize,
    coeffs: Vec<[f64; 3]>,
}

impl SHCoefficients {
    pub fn new(order: usize, coeffs: Vec<[f64; 3]>) -> Result<SHCoefficients> {
        let expect = (order + 1) * (order + 1);
        if coeffs.len() != expect {
            return Err(CoreError::Shape(format!(
                "order {order} needs {expect} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(SHCoefficients { order, coeffs })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[[f64; 3]] {
        &self.coeffs
    }

    /// Coefficient for band `l`, component `m` (|m| <= l).
    pub fn coeff(&self, l: usize, m: i64) -> [f64; 3] {
        let index = l as i64 * (l as i64 + 1) + m;
        self.coeffs[index as usize]
    }

    /// Serializes as a JSON array of `[l, m, r, g, b]` rows.
    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let l = (i as f64).sqrt() as i64;
                let m = i as i64 - l * (l + 1);
                serde_json::json!([l, m, c[0], c[1], c[2]])
            })
            .collect();
        serde_json::Value::Array(rows).to_string()
    }

    /// Parses the `[l, m, r, g, b]` JSON array form.
    pub fn from_json(text: &str) -> Result<SHCoefficients> {
        let rows: Vec<(i64, i64, f64, f64, f64)> = serde_json::from_str(text)
            .map_err(|e| CoreError::Parse { line: 1, msg: format!("SH json: {e}") })?;
        if rows.is_empty() {
            return Err(CoreError::DegenerateInput("empty SH coefficient list".into()));
        }
        let order = rows.iter().map(|r| r.0).max().unwrap().max(0) as usize;
        let mut coeffs = vec![[0.0; 3]; (order + 1) * (order + 1)];
        for (l, m, r, g, b) in rows {
            if l < 0 || m.abs() > l {
                return Err(CoreError::Parse {
                    line: 1,
                    msg: format!("invalid SH index (l={l}, m={m})"),
                });
            }
            coeffs[(l * (l + 1) + m) as usize] = [r, g, b];
        }
        SHCoefficients::new(order, coeffs)
    }
}

/// Evaluates all basis functions up to `order` at a unit direction,
/// returning (order+1)^2 values indexed l*(l+1)+m.
///
/// Associated Legendre values are generated by the standard recurrences with
/// the Condon-Shortley factor omitted.
pub fn eval_sh_basis(order: usize, dir: Vec3) -> Vec<f64> {
    let n = (order + 1) * (order + 1);
    let mut out = vec![0.0f64; n];

    // Polar axis is the vector's z component; the caller picks the frame.
    let z = dir.z.clamp(-1.0, 1.0);
    let s = (dir.x * dir.x + dir.y * dir.y).sqrt();
    // cos(m*phi), sin(m*phi) built incrementally from the azimuthal direction.
    let (cp1, sp1) = if s > 1e-30 { (dir.x / s, dir.y / s) } else { (1.0, 0.0) };

    // P[l][m] without Condon-Shortley, for m <= l <= order.
    let lmax = order;
    let mut p = vec![vec![0.0f64; lmax + 1]; lmax + 1];
    p[0][0] = 1.0;
    for m in 1..=lmax {
        p[m][m] = p[m - 1][m - 1] * (2.0 * m as f64 - 1.0) * s;
    }
    for m in 0..lmax {
        p[m + 1][m] = z * (2.0 * m as f64 + 1.0) * p[m][m];
    }
    for m in 0..=lmax {
        for l in (m + 2)..=lmax {
            p[l][m] = ((2.0 * l as f64 - 1.0) * z * p[l - 1][m]
                - (l as f64 + m as f64 - 1.0) * p[l - 2][m])
                / (l as f64 - m as f64);
        }
    }

    let mut cos_m = vec![0.0f64; lmax + 1];
    let mut sin_m = vec![0.0f64; lmax + 1];
    cos_m[0] = 1.0;
    sin_m[0] = 0.0;
    if lmax >= 1 {
        cos_m[1] = cp1;
        sin_m[1] = sp1;
        for m in 2..=lmax {
            cos_m[m] = 2.0 * cp1 * cos_m[m - 1] - cos_m[m - 2];
            sin_m[m] = 2.0 * cp1 * sin_m[m - 1] - sin_m[m - 2];
        }
    }

    for l in 0..=lmax {
        out[l * (l + 1)] = norm_k(l, 0) * p[l][0];
        for m in 1..=l {
            let k = std::f64::consts::SQRT_2 * norm_k(l, m) * p[l][m];
            out[l * (l + 1) + m] = k * cos_m[m];
            out[l * (l + 1) - m] = k * sin_m[m];
        }
    }
    out
}

/// Orthonormalization constant sqrt((2l+1)/(4 pi) * (l-m)!/(l+m)!).
fn norm_k(l: usize, m: usize) -> f64 {
    let mut ratio = 1.0f64;
    for k in (l - m + 1)..=(l + m) {
        ratio *= k as f64;
    }
    ((2.0 * l as f64 + 1.0) / (4.0 * PI) / ratio).sqrt()
}

/// Projects an environment map onto the SH basis:
/// `c_lm = sum_p radiance(p) * Y_lm(dir(p)) * solid_angle(p)`.
pub fn sh_project(map: &EnvironmentMap, order: usize) -> SHCoefficients {
    let weights = solid_angle_weights(map.width(), map.height());
    let n = (order + 1) * (order + 1);
    let mut coeffs = vec![[0.0f64; 3]; n];
    for row in 0..map.height() {
        let w = weights.row_weight(row);
        for col in 0..map.width() {
            let dir = direction(map, row, col);
            let basis = eval_sh_basis(order, dir);
            let px = map.at(row, col);
            for (c, y) in coeffs.iter_mut().zip(&basis) {
                let yw = y * w;
                c[0] += px[0] * yw;
                c[1] += px[1] * yw;
                c[2] += px[2] * yw;
            }
        }
    }
    SHCoefficients { order, coeffs }
}

fn direction(map: &EnvironmentMap, row: usize, col: usize) -> Vec3 {
    map.direction_from_pixel(row, col, (0.5, 0.5)).expect("in-range pixel")
}

/// Lambertian transfer coefficients; bands above 4 transfer nothing here.
const LAMBERT_BANDS: [f64; 5] = [PI, 2.0 * PI / 3.0, PI / 4.0, 0.0, -PI / 24.0];

/// Irradiance-derived shading at a unit normal:
/// `(1/pi) * sum_lm A_l * c_lm * Y_lm(n)`, clamped at zero.
pub fn sh_irradiance_shading(coeffs: &SHCoefficients, normal: Vec3) -> Result<[f64; 3]> {
    if (normal.length() - 1.0).abs() > 1e-6 {
        return Err(CoreError::Precondition(format!(
            "normal must be unit length, |n| = {}",
            normal.length()
        )));
    }
    let basis = eval_sh_basis(coeffs.order, normal);
    let mut out = [0.0f64; 3];
    for l in 0..=coeffs.order {
        let a = if l < LAMBERT_BANDS.len() { LAMBERT_BANDS[l] } else { 0.0 };
        if a == 0.0 {
            continue;
        }
        for m in 0..(2 * l + 1) {
            let i = l * l + m;
            let y = a * basis[i] / PI;
            out[0] += coeffs.coeffs[i][0] * y;
            out[1] += coeffs.coeffs[i][1] * y;
            out[2] += coeffs.coeffs[i][2] * y;
        }
    }
    Ok([out[0].max(0.0), out[1].max(0.0), out[2].max(0.0)])
}

#[cfg(test)]
mod tests {
    use super::*;

    // Hard-coded first two bands of the graphics-convention basis.
    #[test]
    fn basis_matches_reference_table() {
        let d = Vec3::new(0.48, -0.36, 0.8).normalized();
        let y = eval_sh_basis(2, d);
        let c0 = 0.28209479177387814; // 1/(2 sqrt(pi))
        let c1 = 0.4886025119029199; // sqrt(3/(4 pi))
        assert!((y[0] - c0).abs() < 1e-12);
        assert!((y[1] - c1 * d.y).abs() < 1e-12);
        assert!((y[2] - c1 * d.z).abs() < 1e-12);
        assert!((y[3] - c1 * d.x).abs() < 1e-12);
        let c2 = 1.0925484305920792; // sqrt(15/(4 pi))
        assert!((y[4] - c2 * d.x * d.y).abs() < 1e-12);
        assert!((y[5] - c2 * d.y * d.z).abs() < 1e-12);
        let c20 = 0.31539156525252005; // sqrt(5/(16 pi))
        assert!((y[6] - c20 * (3.0 * d.z * d.z - 1.0)).abs() < 1e-12);
        assert!((y[7] - c2 * d.x * d.z).abs() < 1e-12);
        assert!((y[8] - 0.5 * c2 * (d.x * d.x - d.y * d.y)).abs() < 1e-12);
    }

    // Monte-Carlo-free orthonormality check on a dense lat-long quadrature.
    #[test]
    fn basis_is_orthonormal_under_quadrature() {
        let (w, h) = (128usize, 64usize);
        let weights = solid_angle_weights(w, h);
        let order = 4;
        let n = (order + 1) * (order + 1);
        let mut gram = vec![0.0f64; n * n];
        for row in 0..h {
            for col in 0..w {
                let frow = row as f64 + 0.5;
                let fcol = col as f64 + 0.5;
                let dir = crate::envlight::direction_for(w, h, frow, fcol);
                let y = eval_sh_basis(order, dir);
                let wgt = weights.row_weight(row);
                for i in 0..n {
                    for j in 0..n {
                        gram[i * n + j] += y[i] * y[j] * wgt;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (gram[i * n + j] - expect).abs() < 2e-3,
                    "gram[{i}][{j}] = {}",
                    gram[i * n + j]
                );
            }
        }
    }

    #[test]
    fn constant_map_projects_to_dc_only() {
        let c = 0.8;
        let map = EnvironmentMap::constant(128, 64, [c; 3]).unwrap();
        let coeffs = sh_project(&map, 2);
        let expect_dc = 2.0 * c * PI.sqrt();
        for ch in 0..3 {
            assert!((coeffs.coeffs()[0][ch] - expect_dc).abs() < 1e-3);
        }
        for i in 1..9 {
            for ch in 0..3 {
                assert!(coeffs.coeffs()[i][ch].abs() < 1e-3 * c, "coeff {i} leaked");
            }
        }
    }

    #[test]
    fn coefficient_counts_match_order() {
        let map = EnvironmentMap::constant(8, 4, [1.0; 3]).unwrap();
        assert_eq!(sh_project(&map, 2).coeffs().len(), 9);
        assert_eq!(sh_project(&map, 4).coeffs().len(), 25);
    }

    #[test]
    fn rectified_lobe_dominates_its_own_band() {
        // Map whose radiance is max(Y(1,0)(dir), 0); projection against an
        // independent quadrature oracle on a finer grid.
        let (w, h) = (256usize, 128usize);
        let mut radiance = Vec::with_capacity(w * h);
        for row in 0..h {
            for col in 0..w {
                let dir =
                    crate::envlight::direction_for(w, h, row as f64 + 0.5, col as f64 + 0.5);
                let y = eval_sh_basis(1, dir)[2]; // l=1, m=0
                radiance.push([y.max(0.0); 3]);
            }
        }
        let map = EnvironmentMap::new(w, h, radiance).unwrap();
        let coeffs = sh_project(&map, 2);

        // Oracle: trapezoid-style quadrature over a 1024x512 theta/phi grid
        // with explicit sin(theta) dtheta dphi weights; independent of
        // solid_angle_weights.
        let (ow, oh) = (1024usize, 512usize);
        let dtheta = PI / oh as f64;
        let dphi = std::f64::consts::TAU / ow as f64;
        let mut oracle = [0.0f64; 4];
        for i in 0..oh {
            let theta = (i as f64 + 0.5) * dtheta;
            for j in 0..ow {
                let phi = (j as f64 + 0.5) * dphi;
                let dir = Vec3::new(
                    theta.sin() * phi.cos(),
                    theta.cos(),
                    theta.sin() * phi.sin(),
                );
                let y = eval_sh_basis(1, dir);
                let f = y[2].max(0.0);
                let wgt = theta.sin() * dtheta * dphi;
                for (k, o) in oracle.iter_mut().enumerate() {
                    *o += f * y[k] * wgt;
                }
            }
        }
        for k in 0..4 {
            assert!(
                (coeffs.coeffs()[k][0] - oracle[k]).abs() < 1e-3,
                "coeff {k}: {} vs oracle {}",
                coeffs.coeffs()[k][0],
                oracle[k]
            );
        }
        let band1: Vec<f64> = (1..4).map(|i| coeffs.coeffs()[i][0].abs()).collect();
        assert!(band1[1] > band1[0] * 10.0 && band1[1] > band1[2] * 10.0);
    }

    #[test]
    fn projection_is_linear() {
        let a = test_map(32, 16, 1);
        let b = test_map(32, 16, 2);
        let combo_radiance: Vec<[f64; 3]> = a
            .texels()
            .iter()
            .zip(b.texels())
            .map(|(pa, pb)| {
                [
                    2.0 * pa[0] + 0.5 * pb[0],
                    2.0 * pa[1] + 0.5 * pb[1],
                    2.0 * pa[2] + 0.5 * pb[2],
                ]
            })
            .collect();
        let combo = EnvironmentMap::new(32, 16, combo_radiance).unwrap();
        let ca = sh_project(&a, 2);
        let cb = sh_project(&b, 2);
        let cc = sh_project(&combo, 2);
        for i in 0..9 {
            for ch in 0..3 {
                let expect = 2.0 * ca.coeffs()[i][ch] + 0.5 * cb.coeffs()[i][ch];
                let scale = expect.abs().max(1e-9);
                assert!((cc.coeffs()[i][ch] - expect).abs() / scale < 1e-6);
            }
        }
    }

    #[test]
    fn constant_environment_shades_constant() {
        let c = 1.3;
        let map = EnvironmentMap::constant(128, 64, [c; 3]).unwrap();
        let coeffs = sh_project(&map, 4);
        for dir in [
            Vec3::Y,
            -Vec3::Y,
            Vec3::new(0.6, -0.48, 0.64).normalized(),
            Vec3::X,
        ] {
            let s = sh_irradiance_shading(&coeffs, dir).unwrap();
            for ch in 0..3 {
                assert!((s[ch] - c).abs() / c < 0.01, "shading {} at {dir:?}", s[ch]);
            }
        }
    }

    #[test]
    fn zero_coefficients_shade_black() {
        let coeffs = SHCoefficients::new(2, vec![[0.0; 3]; 9]).unwrap();
        assert_eq!(sh_irradiance_shading(&coeffs, Vec3::Y).unwrap(), [0.0; 3]);
    }

    #[test]
    fn non_unit_normal_is_rejected() {
        let coeffs = SHCoefficients::new(2, vec![[0.0; 3]; 9]).unwrap();
        assert!(matches!(
            sh_irradiance_shading(&coeffs, Vec3::new(0.0, 2.0, 0.0)),
            Err(CoreError::Precondition(_))
        ));
    }

    #[test]
    fn rotation_equivariance_via_reprojection() {
        let map = test_map(64, 32, 3);
        let deg: f64 = 90.0;
        let rotated = map.rotate_yaw(deg);
        let c0 = sh_project(&map, 2);
        let c1 = sh_project(&rotated, 2);
        for dir in [Vec3::Y, Vec3::new(0.6, 0.48, -0.64).normalized(), Vec3::X] {
            let s_rot = sh_irradiance_shading(&c1, dir).unwrap();
            let s_orig = sh_irradiance_shading(&c0, dir.rotated_y(-deg.to_radians())).unwrap();
            for ch in 0..3 {
                assert!((s_rot[ch] - s_orig[ch]).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let map = test_map(16, 8, 5);
        let coeffs = sh_project(&map, 4);
        let text = coeffs.to_json();
        let back = SHCoefficients::from_json(&text).unwrap();
        assert_eq!(back.order(), 4);
        for (a, b) in coeffs.coeffs().iter().zip(back.coeffs()) {
            for ch in 0..3 {
                assert!((a[ch] - b[ch]).abs() < 1e-12);
            }
        }
    }

    fn test_map(w: usize, h: usize, salt: u64) -> EnvironmentMap {
        let mut radiance = Vec::with_capacity(w * h);
        for row in 0..h {
            for col in 0..w {
                let t = (row * w + col) as f64 + salt as f64 * 13.7;
                radiance.push([
                    0.3 + (t * 0.11).sin().abs(),
                    0.2 + (t * 0.07).cos().abs() * 1.5,
                    0.1 + (t * 0.05).sin().powi(2),
                ]);
            }
        }
        EnvironmentMap::new(w, h, radiance).unwrap()
    }
}
