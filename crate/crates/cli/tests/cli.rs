//! Smoke tests driving the compiled `relight` binary end to end.

mod common;

use std::path::Path;
use std::process::Command;

use common::{smooth_env, write_obj};
use relight_core::io;
use relight_core::mesh::primitives::icosphere;
use relight_core::ImageRGB;

fn relight_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relight"))
}

fn write_fixtures(dir: &Path) -> (String, String) {
    let mesh = dir.join("sphere.obj");
    write_obj(&mesh, &icosphere(2, 1.0));
    let env = dir.join("env.pfm");
    io::save_environment(&env, &smooth_env(32, 16)).unwrap();
    (mesh.display().to_string(), env.display().to_string())
}

#[test]
fn trace_writes_all_requested_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (mesh, env) = write_fixtures(dir.path());
    let out_dir = dir.path().join("out");
    let status = relight_bin()
        .args([
            "trace",
            "--mesh",
            &mesh,
            "--env",
            &env,
            "--passes",
            "mask,normal,depth,ao,shading",
            "--spp",
            "8",
            "--seed",
            "1",
            "--size",
            "32x32",
            "--out-dir",
            out_dir.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    for name in ["mask.png", "normal.png", "depth.pfm", "ao.pfm", "shading.pfm"] {
        assert!(out_dir.join(name).exists(), "{name} missing");
    }
}

#[test]
fn envtool_rotate_by_a_full_turn_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let (_, env) = write_fixtures(dir.path());
    let rotated = dir.path().join("rotated.pfm");
    let status = relight_bin()
        .args([
            "envtool",
            "rotate",
            "--input",
            &env,
            "--output",
            rotated.to_str().unwrap(),
            "--degrees",
            "360",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(std::fs::read(&env).unwrap(), std::fs::read(&rotated).unwrap());
}

#[test]
fn envtool_downsample_and_sh_project() {
    let dir = tempfile::tempdir().unwrap();
    let (_, env) = write_fixtures(dir.path());
    let small = dir.path().join("small.pfm");
    assert!(relight_bin()
        .args([
            "envtool",
            "downsample",
            "--input",
            &env,
            "--output",
            small.to_str().unwrap(),
            "--size",
            "16x8",
        ])
        .status()
        .unwrap()
        .success());
    let map = io::load_environment(&small).unwrap();
    assert_eq!((map.width(), map.height()), (16, 8));

    let coeffs_path = dir.path().join("sh.json");
    assert!(relight_bin()
        .args([
            "envtool",
            "sh-project",
            "--input",
            &env,
            "--output",
            coeffs_path.to_str().unwrap(),
            "--order",
            "4",
        ])
        .status()
        .unwrap()
        .success());
    let coeffs = relight_cli::commands::load_sh_json(&coeffs_path).unwrap();
    assert_eq!(coeffs.order(), 4);
    assert_eq!(coeffs.coeffs().len(), 25);
}

#[test]
fn compare_identical_images_reports_the_caps() {
    let dir = tempfile::tempdir().unwrap();
    let img_path = dir.path().join("img.pfm");
    io::save_image(&img_path, &ImageRGB::constant(16, 16, [0.25; 3]).unwrap()).unwrap();
    let output = relight_bin()
        .args([
            "compare",
            "--a",
            img_path.to_str().unwrap(),
            "--b",
            img_path.to_str().unwrap(),
            "--metrics",
            "mse,psnr,ssim",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let line = String::from_utf8(output.stdout).unwrap();
    let value: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(value["mse_scaled"].as_f64().unwrap(), 0.0);
    assert_eq!(value["psnr"].as_f64().unwrap(), 99.0);
    assert_eq!(value["ssim"].as_f64().unwrap(), 1.0);
}

#[test]
fn compare_with_an_empty_mask_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let img_path = dir.path().join("img.pfm");
    io::save_image(&img_path, &ImageRGB::constant(8, 8, [0.5; 3]).unwrap()).unwrap();
    let mask_path = dir.path().join("mask.png");
    io::write_mask_png(
        &mask_path,
        &relight_core::Mask::new(8, 8, vec![false; 64]).unwrap(),
    )
    .unwrap();
    let status = relight_bin()
        .args([
            "compare",
            "--a",
            img_path.to_str().unwrap(),
            "--b",
            img_path.to_str().unwrap(),
            "--mask",
            mask_path.to_str().unwrap(),
            "--metrics",
            "mse",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn dataset_command_runs_a_tiny_grid_from_toml() {
    let dir = tempfile::tempdir().unwrap();
    let (mesh, env) = write_fixtures(dir.path());
    let config_path = dir.path().join("dataset.toml");
    std::fs::write(
        &config_path,
        format!(
            r#"
[grid]
pitches = [0.0]
yaws = [0.0]
scales = [1.0]
lightings_per_pose = 1
env_pool = ["{env}"]
seed = 4

[[models]]
mesh = "{mesh}"
albedo = [0.6, 0.5, 0.4]
"#
        ),
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let status = relight_bin()
        .args([
            "dataset",
            "--config",
            config_path.to_str().unwrap(),
            "--out-dir",
            out_dir.to_str().unwrap(),
            "--spp",
            "8",
            "--size",
            "32x32",
            "--jobs",
            "2",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out_dir.join("manifest.json").exists());
}

#[test]
fn dataset_with_partial_failures_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let (mesh, env) = write_fixtures(dir.path());
    let missing = dir.path().join("missing.pfm").display().to_string();
    let config_path = dir.path().join("dataset.toml");
    // Both pool entries are drawn per pose, so the missing one fails its set.
    std::fs::write(
        &config_path,
        format!(
            r#"
[grid]
pitches = [0.0]
yaws = [0.0]
scales = [1.0]
lightings_per_pose = 2
env_pool = ["{env}", "{missing}"]

[[models]]
mesh = "{mesh}"
"#
        ),
    )
    .unwrap();
    let status = relight_bin()
        .args([
            "dataset",
            "--config",
            config_path.to_str().unwrap(),
            "--out-dir",
            dir.path().join("out").to_str().unwrap(),
            "--spp",
            "4",
            "--size",
            "16x16",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn dataset_with_a_bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("dataset.toml");
    // No environment pool: fatal configuration error.
    std::fs::write(&config_path, "[grid]\nenv_pool = []\n").unwrap();
    let status = relight_bin()
        .args([
            "dataset",
            "--config",
            config_path.to_str().unwrap(),
            "--out-dir",
            dir.path().join("out").to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}
