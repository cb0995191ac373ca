//! Shared fixtures for the integration tests: on-disk meshes and
//! environment maps, plus directory comparison helpers.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use relight_core::envlight::EnvironmentMap;
use relight_core::math::Vec3;
use relight_core::mesh::TriangleMesh;

pub fn write_obj(path: &Path, mesh: &TriangleMesh) {
    let mut text = String::new();
    for p in mesh.positions() {
        writeln!(text, "v {} {} {}", p.x, p.y, p.z).unwrap();
    }
    for t in mesh.triangles() {
        writeln!(text, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
    }
    std::fs::write(path, text).unwrap();
}

/// Smooth two-lobe HDR test environment.
pub fn smooth_env(w: usize, h: usize) -> EnvironmentMap {
    let probe = EnvironmentMap::constant(w, h, [1.0; 3]).unwrap();
    let mut radiance = Vec::with_capacity(w * h);
    for row in 0..h {
        for col in 0..w {
            let dir = probe.direction_from_pixel(row, col, (0.5, 0.5)).unwrap();
            let lobe1 = Vec3::new(0.5, 0.8, 0.2).normalized();
            let lobe2 = Vec3::new(-0.6, 0.3, -0.74).normalized();
            let a = (dir.dot(lobe1).max(0.0)).powi(4) * 3.0;
            let b = (dir.dot(lobe2).max(0.0)).powi(2) * 1.5;
            let base = 0.15 + 0.1 * (dir.y + 1.0);
            radiance.push([base + a, base + 0.7 * a + 0.3 * b, base + b]);
        }
    }
    EnvironmentMap::new(w, h, radiance).unwrap()
}

/// All-black map except one bright texel at the pixel containing `toward`.
pub fn single_texel_env(w: usize, h: usize, toward: Vec3, value: f64) -> EnvironmentMap {
    let probe = EnvironmentMap::constant(w, h, [1.0; 3]).unwrap();
    let (row, col) = probe.pixel_from_direction(toward);
    let mut radiance = vec![[0.0f64; 3]; w * h];
    radiance[row * w + col] = [value; 3];
    EnvironmentMap::new(w, h, radiance).unwrap()
}

/// Recursively lists files (relative paths) under a directory, sorted.
pub fn list_files(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    fn walk(base: &Path, dir: &Path, out: &mut Vec<PathBuf>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(base, &path, out);
            } else {
                out.push(path.strip_prefix(base).unwrap().to_path_buf());
            }
        }
    }
    walk(root, root, &mut out);
    out.sort();
    out
}

/// Asserts two output trees are byte-identical.
pub fn assert_dirs_identical(a: &Path, b: &Path) {
    let files_a = list_files(a);
    let files_b = list_files(b);
    assert_eq!(files_a, files_b, "file sets differ between runs");
    for rel in &files_a {
        let bytes_a = std::fs::read(a.join(rel)).unwrap();
        let bytes_b = std::fs::read(b.join(rel)).unwrap();
        assert_eq!(bytes_a, bytes_b, "{} differs between runs", rel.display());
    }
}
