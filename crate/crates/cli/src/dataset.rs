//! Dataset synthesis: renders the full pose/lighting grid for every model
//! and writes a manifest describing every set.
//!
//! Outputs are a pure function of (models, grid, seed): render seeds derive
//! from set coordinates, lighting draws are seeded per pose, and poses run
//! in parallel with the results assembled in grid order afterwards.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;

use relight_core::compose::compose_relit;
use relight_core::envlight::{EnvSampler, EnvironmentMap};
use relight_core::io;
use relight_core::mesh::{laplacian_smooth, load_obj, SmoothingConfig};
use relight_core::tracer::rng::{mix_seed, CounterRng};
use relight_core::{GBuffer, ImageRGB, RenderConfig, Scene};

use crate::config::{DatasetGrid, ModelSpec};
use crate::jobs::with_jobs;
use crate::pose::camera_from_pose;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct SetFiles {
    pub image: String,
    pub mask: String,
    pub albedo: String,
    pub shading: String,
    pub normal: String,
    pub ao: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SetEntry {
    pub id: String,
    pub model_index: usize,
    pub mesh: String,
    pub pitch: f64,
    pub yaw: f64,
    pub scale: f64,
    pub lighting_index: usize,
    pub env: String,
    pub seed: u64,
    pub status: SetStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub files: Option<SetFiles>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SetStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelEntry {
    pub mesh: String,
    pub albedo: [f64; 3],
    pub status: SetStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub seed: u64,
    pub spp: usize,
    pub width: usize,
    pub height: usize,
    pub grid: DatasetGrid,
    pub models: Vec<ModelEntry>,
    pub sets: Vec<SetEntry>,
}

impl Manifest {
    pub fn failed_sets(&self) -> usize {
        self.sets.iter().filter(|s| s.status == SetStatus::Failed).count()
    }

    pub fn has_failures(&self) -> bool {
        self.failed_sets() > 0 || self.models.iter().any(|m| m.status == SetStatus::Failed)
    }
}

#[derive(Debug, Clone)]
pub struct DatasetParams {
    pub grid: DatasetGrid,
    pub models: Vec<ModelSpec>,
    pub out_dir: PathBuf,
    pub spp: usize,
    pub width: usize,
    pub height: usize,
    pub jobs: Option<usize>,
    /// Smoothing applied to every model before tracing; scanned ground-truth
    /// models default to none (smoothing targets reconstructed meshes).
    pub smooth: Option<SmoothingConfig>,
}

/// Draws `k` distinct indices from `0..n` with a partial Fisher-Yates
/// shuffle seeded by the stream parts.
pub fn draw_without_replacement(seed_parts: &[u64], k: usize, n: usize) -> Vec<usize> {
    assert!(k <= n);
    let rng = CounterRng::new(mix_seed(seed_parts));
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let remaining = (n - i) as f64;
        let j = i + (rng.uniform(i as u64, 0) * remaining) as usize;
        pool.swap(i, j.min(n - 1));
    }
    pool.truncate(k);
    pool
}

fn fmt_num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e9 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

struct PoseJob {
    model_index: usize,
    pose_index: usize,
    pitch: f64,
    yaw: f64,
    scale: f64,
    env_indices: Vec<usize>,
}

pub fn generate_dataset(params: &DatasetParams) -> anyhow::Result<Manifest> {
    params.grid.validate()?;
    if params.models.is_empty() {
        anyhow::bail!("no models to render");
    }
    std::fs::create_dir_all(&params.out_dir)
        .with_context(|| format!("creating {}", params.out_dir.display()))?;

    // Environment pool loads once; failures are recorded and poison only
    // the sets drawn onto them.
    let envs: Vec<Result<Arc<(EnvironmentMap, EnvSampler)>, String>> = params
        .grid
        .env_pool
        .iter()
        .map(|path| {
            io::load_environment(path)
                .and_then(|env| {
                    let sampler = EnvSampler::build(&env)?;
                    Ok(Arc::new((env, sampler)))
                })
                .map_err(|e| format!("{}: {e}", path.display()))
        })
        .collect();

    // Models load once; unreadable models are skipped with an error entry.
    let mut model_entries = Vec::with_capacity(params.models.len());
    let mut scenes: Vec<Option<Arc<Scene>>> = Vec::with_capacity(params.models.len());
    for spec in &params.models {
        match prepare_scene(&spec.mesh, params.smooth.as_ref()) {
            Ok(scene) => {
                model_entries.push(ModelEntry {
                    mesh: spec.mesh.display().to_string(),
                    albedo: spec.albedo,
                    status: SetStatus::Ok,
                    error: None,
                });
                scenes.push(Some(Arc::new(scene)));
            }
            Err(e) => {
                log::error!("skipping model {}: {e}", spec.mesh.display());
                model_entries.push(ModelEntry {
                    mesh: spec.mesh.display().to_string(),
                    albedo: spec.albedo,
                    status: SetStatus::Failed,
                    error: Some(e.to_string()),
                });
                scenes.push(None);
            }
        }
    }

    let poses = params.grid.poses();
    let mut jobs = Vec::new();
    for (model_index, scene) in scenes.iter().enumerate() {
        if scene.is_none() {
            continue;
        }
        for (pose_index, &(pitch, yaw, scale)) in poses.iter().enumerate() {
            let env_indices = draw_without_replacement(
                &[params.grid.seed, model_index as u64, pose_index as u64],
                params.grid.lightings_per_pose,
                params.grid.env_pool.len(),
            );
            jobs.push(PoseJob { model_index, pose_index, pitch, yaw, scale, env_indices });
        }
    }

    let set_lists: Vec<Vec<SetEntry>> = with_jobs(params.jobs, || {
        jobs.par_iter()
            .map(|job| {
                let scene = scenes[job.model_index].as_ref().expect("job has scene");
                render_pose(params, job, scene, &envs)
            })
            .collect()
    });

    let manifest = Manifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        seed: params.grid.seed,
        spp: params.spp,
        width: params.width,
        height: params.height,
        grid: params.grid.clone(),
        models: model_entries,
        sets: set_lists.into_iter().flatten().collect(),
    };

    let manifest_path = params.out_dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(&manifest_path, json)
        .with_context(|| format!("writing {}", manifest_path.display()))?;
    Ok(manifest)
}

fn prepare_scene(mesh_path: &Path, smooth: Option<&SmoothingConfig>) -> anyhow::Result<Scene> {
    let mesh = load_obj(mesh_path)?;
    let mesh = match smooth {
        Some(cfg) => laplacian_smooth(&mesh, cfg)?,
        None => mesh,
    };
    Ok(Scene::new(mesh)?)
}

fn render_pose(
    params: &DatasetParams,
    job: &PoseJob,
    scene: &Scene,
    envs: &[Result<Arc<(EnvironmentMap, EnvSampler)>, String>],
) -> Vec<SetEntry> {
    let spec = &params.models[job.model_index];
    let mut entries = Vec::with_capacity(job.env_indices.len());

    let pose_seed = mix_seed(&[
        params.grid.seed,
        job.model_index as u64,
        job.pose_index as u64,
        0xA0,
    ]);
    let base_cfg = RenderConfig { spp: params.spp, seed: pose_seed, ..RenderConfig::default() };

    // Geometry and AO are lighting-independent: render once per pose.
    let base = camera_from_pose(
        job.pitch,
        job.yaw,
        job.scale,
        &scene.mesh().bounds(),
        params.width,
        params.height,
    )
    .map_err(anyhow::Error::from)
    .and_then(|camera| {
        let mut g = scene.render_geometry(&camera, &base_cfg)?;
        scene.render_ao(&camera, &base_cfg, &mut g)?;
        Ok((camera, g))
    });

    for (lighting_index, &env_index) in job.env_indices.iter().enumerate() {
        let set_seed = mix_seed(&[
            params.grid.seed,
            job.model_index as u64,
            job.pose_index as u64,
            lighting_index as u64,
        ]);
        let id = format!(
            "m{:02}_p{}_y{}_s{}_l{}",
            job.model_index,
            fmt_num(job.pitch),
            fmt_num(job.yaw),
            fmt_num(job.scale),
            lighting_index
        );
        let env_path = params.grid.env_pool[env_index].display().to_string();
        let mut entry = SetEntry {
            id: id.clone(),
            model_index: job.model_index,
            mesh: spec.mesh.display().to_string(),
            pitch: job.pitch,
            yaw: job.yaw,
            scale: job.scale,
            lighting_index,
            env: env_path,
            seed: set_seed,
            status: SetStatus::Ok,
            error: None,
            files: None,
        };

        let result = (|| -> anyhow::Result<SetFiles> {
            let (camera, base_gbuffer) =
                base.as_ref().map_err(|e| anyhow::anyhow!("{e}"))?;
            let env = envs[env_index]
                .as_ref()
                .map_err(|e| anyhow::anyhow!("environment failed to load: {e}"))?;
            let mut g = base_gbuffer.clone();
            let cfg = RenderConfig { spp: params.spp, seed: set_seed, ..RenderConfig::default() };
            scene.render_shading(camera, &env.1, &cfg, &mut g)?;
            write_set(params, &id, spec.albedo, &g)
        })();

        match result {
            Ok(files) => entry.files = Some(files),
            Err(e) => {
                log::error!("set {id} failed: {e}");
                entry.status = SetStatus::Failed;
                entry.error = Some(e.to_string());
            }
        }
        entries.push(entry);
    }
    entries
}

/// Writes the six planes of one set and returns their manifest paths
/// (relative to the output directory).
fn write_set(
    params: &DatasetParams,
    id: &str,
    albedo: [f64; 3],
    g: &GBuffer,
) -> anyhow::Result<SetFiles> {
    let rel_dir = PathBuf::from(id);
    let dir = params.out_dir.join(&rel_dir);
    std::fs::create_dir_all(&dir)?;

    let files = SetFiles {
        image: rel_dir.join("image.pfm").to_string_lossy().into_owned(),
        mask: rel_dir.join("mask.png").to_string_lossy().into_owned(),
        albedo: rel_dir.join("albedo.pfm").to_string_lossy().into_owned(),
        shading: rel_dir.join("shading.pfm").to_string_lossy().into_owned(),
        normal: rel_dir.join("normal.png").to_string_lossy().into_owned(),
        ao: rel_dir.join("ao.pfm").to_string_lossy().into_owned(),
    };

    let albedo_image = albedo_plane(albedo, g)?;
    let shading_image = g.shading_image();
    let image = compose_relit(&albedo_image, &shading_image)?;

    io::write_mask_png(&dir.join("mask.png"), &g.mask_plane())?;
    io::write_normal_png(&dir.join("normal.png"), g)?;
    io::write_pfm(&dir.join("ao.pfm"), g.width(), g.height(), 1, &io::plane_to_f32(g.ao()))?;
    io::save_image(&dir.join("shading.pfm"), &shading_image)?;
    io::save_image(&dir.join("albedo.pfm"), &albedo_image)?;
    io::save_image(&dir.join("image.pfm"), &image)?;
    Ok(files)
}

/// Flat albedo color over the mask, zero outside, mask attached as alpha.
fn albedo_plane(albedo: [f64; 3], g: &GBuffer) -> anyhow::Result<ImageRGB> {
    let data = g
        .mask()
        .iter()
        .map(|&m| if m { albedo } else { [0.0; 3] })
        .collect();
    let img = ImageRGB::new(g.width(), g.height(), data)?;
    let mask = g.mask().iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
    Ok(img.with_mask(mask)?)
}
