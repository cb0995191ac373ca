//! End-to-end pipeline behavior: relight identities, face compositing,
//! dataset failure handling and the compare runner.

mod common;

use std::path::PathBuf;

use common::{single_texel_env, smooth_env, write_obj};
use relight_cli::commands::{run_compare, CompareParams, MetricKind};
use relight_cli::config::{DatasetGrid, ModelSpec};
use relight_cli::dataset::{generate_dataset, DatasetParams, SetStatus};
use relight_cli::relight::{run_relight, RelightParams};
use relight_core::compose::RegionSpec;
use relight_core::io;
use relight_core::mesh::primitives::icosphere;
use relight_core::mesh::SmoothingConfig;
use relight_core::{EnvironmentMap, ImageRGB};

fn setup_model(dir: &std::path::Path) -> PathBuf {
    let mesh_path = dir.join("sphere.obj");
    write_obj(&mesh_path, &icosphere(2, 1.0));
    mesh_path
}

#[test]
fn white_albedo_under_uniform_light_relights_to_the_light_color() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = setup_model(dir.path());
    let albedo_path = dir.path().join("albedo.pfm");
    io::save_image(&albedo_path, &ImageRGB::constant(64, 64, [1.0; 3]).unwrap()).unwrap();
    let env_path = dir.path().join("env.pfm");
    let c = 0.6;
    io::save_environment(&env_path, &EnvironmentMap::constant(64, 32, [c; 3]).unwrap()).unwrap();

    let out = run_relight(&RelightParams {
        mesh,
        albedo: albedo_path,
        env: env_path,
        spp: 128,
        seed: 5,
        out_dir: dir.path().join("out"),
        ..RelightParams::default()
    })
    .unwrap();

    let mut masked = 0;
    for (i, &m) in out.gbuffer.mask().iter().enumerate() {
        if !m {
            continue;
        }
        masked += 1;
        for ch in 0..3 {
            let v = out.relit.pixels()[i][ch];
            assert!((v - c).abs() / c < 0.05, "pixel {i} channel {ch}: {v}");
        }
    }
    assert!(masked > 500);
    for name in ["mask.png", "normal.png", "depth.pfm", "shading.pfm", "relit.pfm", "relit.png"] {
        assert!(dir.path().join("out").join(name).exists(), "{name} missing");
    }
}

#[test]
fn relight_without_face_mesh_keeps_the_body_shading() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = setup_model(dir.path());
    let albedo_path = dir.path().join("albedo.pfm");
    io::save_image(&albedo_path, &ImageRGB::constant(48, 48, [0.5; 3]).unwrap()).unwrap();
    let env_path = dir.path().join("env.pfm");
    io::save_environment(&env_path, &smooth_env(32, 16)).unwrap();

    let out = run_relight(&RelightParams {
        mesh,
        albedo: albedo_path,
        env: env_path,
        spp: 32,
        out_dir: dir.path().join("out"),
        ..RelightParams::default()
    })
    .unwrap();
    assert_eq!(out.shading.pixels(), out.gbuffer.shading_image().pixels());
}

#[test]
fn face_pass_of_the_same_mesh_composites_to_the_body_shading() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = setup_model(dir.path());
    let albedo_path = dir.path().join("albedo.pfm");
    io::save_image(&albedo_path, &ImageRGB::constant(48, 48, [1.0; 3]).unwrap()).unwrap();
    let env_path = dir.path().join("env.pfm");
    io::save_environment(&env_path, &smooth_env(32, 16)).unwrap();

    // Since the face mesh equals the body mesh (both unsmoothed here), the
    // face pass reproduces the body pass bit-exactly; with a hard-edged
    // region the composite must be a no-op.
    let out = run_relight(&RelightParams {
        mesh: mesh.clone(),
        albedo: albedo_path,
        env: env_path,
        face_mesh: Some(mesh),
        region: Some(RegionSpec { row0: 10, col0: 10, rows: 20, cols: 20, feather: 0 }),
        smooth: SmoothingConfig { steps: 0, ..SmoothingConfig::default() },
        spp: 16,
        out_dir: dir.path().join("out"),
        ..RelightParams::default()
    })
    .unwrap();
    assert_eq!(out.shading.pixels(), out.gbuffer.shading_image().pixels());
    assert!(dir.path().join("out/shading_face.pfm").exists());
}

#[test]
fn face_mesh_without_region_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = setup_model(dir.path());
    let result = run_relight(&RelightParams {
        mesh: mesh.clone(),
        albedo: dir.path().join("missing.pfm"),
        env: dir.path().join("missing.pfm"),
        face_mesh: Some(mesh),
        region: None,
        out_dir: dir.path().join("out"),
        ..RelightParams::default()
    });
    let err = result.err().expect("missing region must fail");
    assert!(err.to_string().contains("--region"), "{err}");
}

#[test]
fn dataset_records_unreadable_models_and_env_failures() {
    let dir = tempfile::tempdir().unwrap();
    let good_mesh = setup_model(dir.path());
    let good_env = dir.path().join("env0.pfm");
    io::save_environment(&good_env, &smooth_env(16, 8)).unwrap();
    let missing_env = dir.path().join("missing.pfm");

    let grid = DatasetGrid {
        pitches: vec![0.0],
        yaws: vec![0.0],
        scales: vec![1.0],
        lightings_per_pose: 2,
        env_pool: vec![good_env, missing_env],
        seed: 3,
    };
    let manifest = generate_dataset(&DatasetParams {
        grid,
        models: vec![
            ModelSpec { mesh: good_mesh, albedo: [0.5, 0.5, 0.5] },
            ModelSpec { mesh: dir.path().join("no-such.obj"), albedo: [0.5, 0.5, 0.5] },
        ],
        out_dir: dir.path().join("out"),
        spp: 8,
        width: 32,
        height: 32,
        jobs: Some(2),
        smooth: None,
    })
    .unwrap();

    assert!(manifest.has_failures());
    // The unreadable model is skipped with an error entry and no sets.
    assert_eq!(manifest.models[1].status, SetStatus::Failed);
    assert!(manifest.sets.iter().all(|s| s.model_index == 0));
    // Both pool entries are drawn (2 lightings from a pool of 2), so one
    // set fails on the unreadable environment while the other succeeds.
    assert_eq!(manifest.sets.len(), 2);
    assert_eq!(manifest.sets.iter().filter(|s| s.status == SetStatus::Failed).count(), 1);
    assert_eq!(manifest.failed_sets(), 1);
}

#[test]
fn single_set_grid_produces_one_set() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = setup_model(dir.path());
    let env = dir.path().join("env0.pfm");
    io::save_environment(&env, &smooth_env(16, 8)).unwrap();
    let grid = DatasetGrid {
        pitches: vec![0.0],
        yaws: vec![0.0],
        scales: vec![1.0],
        lightings_per_pose: 1,
        env_pool: vec![env],
        seed: 0,
    };
    let manifest = generate_dataset(&DatasetParams {
        grid,
        models: vec![ModelSpec { mesh, albedo: [0.7, 0.6, 0.5] }],
        out_dir: dir.path().join("out"),
        spp: 8,
        width: 32,
        height: 32,
        jobs: Some(1),
        smooth: None,
    })
    .unwrap();
    assert_eq!(manifest.sets.len(), 1);
    assert!(!manifest.has_failures());
    let files = manifest.sets[0].files.as_ref().unwrap();
    for rel in [&files.image, &files.mask, &files.albedo, &files.shading, &files.normal, &files.ao]
    {
        assert!(dir.path().join("out").join(rel).exists(), "{rel} missing");
    }
}

#[test]
fn full_relight_run_preserves_the_product_identity() {
    // Full-scale self-consistency: a larger figure at 512x512 and 128 spp
    // completes, and the written files satisfy relit = albedo * shading on
    // the mask to within float32 storage error.
    let dir = tempfile::tempdir().unwrap();
    let mesh_path = dir.path().join("figure.obj");
    write_obj(&mesh_path, &icosphere(4, 1.0));
    let albedo_path = dir.path().join("albedo.pfm");
    io::save_image(&albedo_path, &ImageRGB::constant(512, 512, [0.75, 0.6, 0.5]).unwrap())
        .unwrap();
    let env_path = dir.path().join("env.pfm");
    io::save_environment(&env_path, &smooth_env(64, 32)).unwrap();

    let out_dir = dir.path().join("out");
    run_relight(&RelightParams {
        mesh: mesh_path,
        albedo: albedo_path.clone(),
        env: env_path,
        spp: 128,
        seed: 9,
        out_dir: out_dir.clone(),
        ..RelightParams::default()
    })
    .unwrap();

    let relit = io::load_image(&out_dir.join("relit.pfm")).unwrap();
    let shading = io::load_image(&out_dir.join("shading.pfm")).unwrap();
    let albedo = io::load_image(&albedo_path).unwrap();
    let mask = io::read_mask_png(&out_dir.join("mask.png")).unwrap();
    assert!(mask.count() > 50_000, "figure should fill a good part of the frame");
    for i in 0..512 * 512 {
        if !mask.data()[i] {
            continue;
        }
        for ch in 0..3 {
            let expect = albedo.pixels()[i][ch] * shading.pixels()[i][ch];
            assert!(
                (relit.pixels()[i][ch] - expect).abs() <= 1e-3,
                "pixel {i} channel {ch}"
            );
        }
    }
}

#[test]
fn compare_emits_the_requested_metrics_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let a_path = dir.path().join("a.pfm");
    let b_path = dir.path().join("b.pfm");
    io::save_image(&a_path, &ImageRGB::constant(32, 16, [0.3; 3]).unwrap()).unwrap();
    io::save_image(&b_path, &ImageRGB::constant(32, 16, [0.4; 3]).unwrap()).unwrap();

    let line = run_compare(&CompareParams {
        a: a_path,
        b: b_path,
        mask: None,
        metrics: MetricKind::parse_list("mse,psnr,ssim,fft,light").unwrap(),
        fft_magnitude: false,
        light_asymmetric: false,
    })
    .unwrap();
    assert!(!line.contains('\n'));
    let value: serde_json::Value = serde_json::from_str(&line).unwrap();
    // f32 storage: the 0.1 offset survives to about 1e-7.
    assert!((value["mse_scaled"].as_f64().unwrap() - 10.0).abs() < 1e-3);
    assert!((value["psnr"].as_f64().unwrap() - 20.0).abs() < 1e-3);
    assert!(value["ssim"].as_f64().unwrap() < 1.0);
    assert!(value["fft_l1"].as_f64().unwrap() > 0.0);
    assert!(value["light_loss"].as_f64().unwrap() > 0.0);
    assert_eq!(value["pixel_count"].as_u64().unwrap(), 512);
}

#[test]
fn hard_shadow_from_a_single_texel_environment_lands_where_projected() {
    // Small-scale version of the shadow acceptance check: a floating quad
    // over a ground plane under a one-texel light must darken the pixels
    // inside the analytically projected quadrilateral.
    use relight_cli::camera_from_pose;
    use relight_core::envlight::EnvSampler;
    use relight_core::math::Vec3;
    use relight_core::mesh::primitives::quad;
    use relight_core::mesh::TriangleMesh;
    use relight_core::{RenderConfig, Scene};

    let ground = quad(
        Vec3::new(-2.0, 0.0, -2.0),
        Vec3::new(2.0, 0.0, -2.0),
        Vec3::new(2.0, 0.0, 2.0),
        Vec3::new(-2.0, 0.0, 2.0),
    );
    let blocker = quad(
        Vec3::new(-0.5, 0.6, -0.5),
        Vec3::new(0.5, 0.6, -0.5),
        Vec3::new(0.5, 0.6, 0.5),
        Vec3::new(-0.5, 0.6, 0.5),
    );
    let mut positions = ground.positions().to_vec();
    positions.extend_from_slice(blocker.positions());
    let mut triangles = ground.triangles().to_vec();
    triangles.extend(blocker.triangles().iter().map(|t| t.map(|v| v + 4)));
    let mesh = TriangleMesh::new(positions, triangles).unwrap();

    // Tilted enough that the cast shadow clears the blocker's footprint.
    let env = single_texel_env(512, 256, Vec3::new(1.9, 1.0, 0.3).normalized(), 2000.0);
    let probe = env.texels().iter().position(|p| p[0] > 0.0).unwrap();
    let (row, col) = (probe / 512, probe % 512);
    let light = env.direction_from_pixel(row, col, (0.5, 0.5)).unwrap();

    let scene = Scene::new(mesh).unwrap();
    let bounds = scene.mesh().bounds();
    let camera = camera_from_pose(80.0, 0.0, 1.0, &bounds, 96, 96).unwrap();
    let sampler = EnvSampler::build(&env).unwrap();
    let cfg = RenderConfig { spp: 8, seed: 2, ..RenderConfig::default() };
    let mut g = scene.render_geometry(&camera, &cfg).unwrap();
    scene.render_shading(&camera, &sampler, &cfg, &mut g).unwrap();

    // Corners of the blocker projected along the light onto y = 0.
    let shadow_world: Vec<Vec3> = scene.mesh().positions()[4..8]
        .iter()
        .map(|p| *p - light * (p.y / light.y))
        .collect();
    let center_world = (shadow_world[0] + shadow_world[2]) * 0.5;
    let (cx, cy) = camera.project_point(center_world);
    let center_px = (cy as usize) * 96 + cx as usize;
    // The shadow quad center is on the visible ground and fully dark.
    assert!(g.mask()[center_px]);
    assert_eq!(g.shading()[center_px], [0.0; 3]);

    // A ground point far from the shadow is lit.
    let (lx, ly) = camera.project_point(Vec3::new(-1.7, 0.0, -1.7));
    let lit_px = (ly as usize) * 96 + lx as usize;
    assert!(g.mask()[lit_px]);
    assert!(g.shading()[lit_px][0] > 0.0);
}
