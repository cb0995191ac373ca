//! Runners for the `trace`, `envtool` and `compare` subcommands.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde_json::json;

use relight_core::envlight::{downsample_pyramid, sh_project, EnvSampler, SHCoefficients};
use relight_core::io;
use relight_core::mesh::{laplacian_smooth, load_obj, SmoothingConfig};
use relight_core::metrics::{
    fft_l1_with, light_loss_with, mse_psnr, ssim, FftMode, LightLossForm,
};
use relight_core::{EnvironmentMap, ImageRGB, Mask, RenderConfig, Scene};

use crate::jobs::with_jobs;
use crate::pose::camera_from_pose;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pass {
    Mask,
    Normal,
    Depth,
    Ao,
    Shading,
}

impl Pass {
    pub fn parse_list(text: &str) -> anyhow::Result<Vec<Pass>> {
        text.split(',')
            .map(|p| match p.trim() {
                "mask" => Ok(Pass::Mask),
                "normal" => Ok(Pass::Normal),
                "depth" => Ok(Pass::Depth),
                "ao" => Ok(Pass::Ao),
                "shading" => Ok(Pass::Shading),
                other => bail!("unknown pass {other:?}"),
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct TraceParams {
    pub mesh: PathBuf,
    pub env: Option<PathBuf>,
    pub passes: Vec<Pass>,
    pub spp: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub width: usize,
    pub height: usize,
    pub pitch: f64,
    pub yaw: f64,
    pub scale: f64,
    pub smooth: SmoothingConfig,
    pub jobs: Option<usize>,
}

pub fn run_trace(params: &TraceParams) -> anyhow::Result<()> {
    let mesh = load_obj(&params.mesh)
        .with_context(|| format!("loading mesh {}", params.mesh.display()))?;
    let mesh = laplacian_smooth(&mesh, &params.smooth)?;
    let scene = Scene::new(mesh)?;
    let camera = camera_from_pose(
        params.pitch,
        params.yaw,
        params.scale,
        &scene.mesh().bounds(),
        params.width,
        params.height,
    )?;
    let cfg = RenderConfig { spp: params.spp, seed: params.seed, ..RenderConfig::default() };

    let want = |p: Pass| params.passes.contains(&p);
    let sampler = match (&params.env, want(Pass::Shading)) {
        (Some(path), true) => {
            let env = io::load_environment(path)?;
            Some(EnvSampler::build(&env)?)
        }
        (None, true) => bail!("pass `shading` requires --env"),
        _ => None,
    };

    let gbuffer = with_jobs(params.jobs, || -> anyhow::Result<_> {
        let mut g = scene.render_geometry(&camera, &cfg)?;
        if want(Pass::Ao) {
            scene.render_ao(&camera, &cfg, &mut g)?;
        }
        if let Some(sampler) = &sampler {
            scene.render_shading(&camera, sampler, &cfg, &mut g)?;
        }
        Ok(g)
    })?;

    std::fs::create_dir_all(&params.out_dir)?;
    let out = |name: &str| params.out_dir.join(name);
    if want(Pass::Mask) {
        io::write_mask_png(&out("mask.png"), &gbuffer.mask_plane())?;
    }
    if want(Pass::Normal) {
        io::write_normal_png(&out("normal.png"), &gbuffer)?;
    }
    if want(Pass::Depth) {
        io::write_pfm(
            &out("depth.pfm"),
            gbuffer.width(),
            gbuffer.height(),
            1,
            &io::plane_to_f32(gbuffer.depth()),
        )?;
    }
    if want(Pass::Ao) {
        io::write_pfm(
            &out("ao.pfm"),
            gbuffer.width(),
            gbuffer.height(),
            1,
            &io::plane_to_f32(gbuffer.ao()),
        )?;
    }
    if want(Pass::Shading) {
        io::save_image(&out("shading.pfm"), &gbuffer.shading_image())?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub enum EnvtoolOp {
    Rotate { degrees: f64 },
    Downsample { width: usize, height: usize },
    ShProject { order: usize },
}

pub fn run_envtool(input: &Path, output: &Path, op: &EnvtoolOp) -> anyhow::Result<()> {
    let env = io::load_environment(input)
        .with_context(|| format!("loading environment {}", input.display()))?;
    match op {
        EnvtoolOp::Rotate { degrees } => {
            io::save_environment(output, &env.rotate_yaw(*degrees))?;
        }
        EnvtoolOp::Downsample { width, height } => {
            io::save_environment(output, &downsample_pyramid(&env, *width, *height)?)?;
        }
        EnvtoolOp::ShProject { order } => {
            let coeffs = sh_project(&env, *order);
            std::fs::write(output, coeffs.to_json())?;
        }
    }
    Ok(())
}

/// Reads SH coefficients back from the JSON written by `sh-project`.
pub fn load_sh_json(path: &Path) -> anyhow::Result<SHCoefficients> {
    let text = std::fs::read_to_string(path)?;
    Ok(SHCoefficients::from_json(&text)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Mse,
    Psnr,
    Ssim,
    Fft,
    Light,
}

impl MetricKind {
    pub fn parse_list(text: &str) -> anyhow::Result<Vec<MetricKind>> {
        text.split(',')
            .map(|m| match m.trim() {
                "mse" => Ok(MetricKind::Mse),
                "psnr" => Ok(MetricKind::Psnr),
                "ssim" => Ok(MetricKind::Ssim),
                "fft" => Ok(MetricKind::Fft),
                "light" => Ok(MetricKind::Light),
                other => bail!("unknown metric {other:?}"),
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct CompareParams {
    pub a: PathBuf,
    pub b: PathBuf,
    pub mask: Option<PathBuf>,
    pub metrics: Vec<MetricKind>,
    pub fft_magnitude: bool,
    pub light_asymmetric: bool,
}

/// Computes the requested metrics and returns them as one JSON line.
pub fn run_compare(params: &CompareParams) -> anyhow::Result<String> {
    let a = io::load_image(&params.a)
        .with_context(|| format!("loading {}", params.a.display()))?;
    let b = io::load_image(&params.b)
        .with_context(|| format!("loading {}", params.b.display()))?;
    let mask: Option<Mask> = match &params.mask {
        Some(path) => Some(io::read_mask_png(path)?),
        None => None,
    };

    let has = |m: MetricKind| params.metrics.contains(&m);
    let mut report = serde_json::Map::new();
    if has(MetricKind::Mse) || has(MetricKind::Psnr) {
        let (mse_scaled, psnr) = mse_psnr(&a, &b, mask.as_ref())?;
        if has(MetricKind::Mse) {
            report.insert("mse_scaled".into(), json!(mse_scaled));
        }
        if has(MetricKind::Psnr) {
            report.insert("psnr".into(), json!(psnr));
        }
    }
    if has(MetricKind::Ssim) {
        report.insert("ssim".into(), json!(ssim(&a, &b, mask.as_ref())?));
    }
    if has(MetricKind::Fft) {
        let mode = if params.fft_magnitude { FftMode::Magnitude } else { FftMode::Complex };
        report.insert("fft_l1".into(), json!(fft_l1_with(&a, &b, mode)?));
    }
    if has(MetricKind::Light) {
        let form = if params.light_asymmetric {
            LightLossForm::Asymmetric
        } else {
            LightLossForm::SymmetricWeighted
        };
        let env_a = as_environment(&a)?;
        let env_b = as_environment(&b)?;
        report.insert("light_loss".into(), json!(light_loss_with(&env_a, &env_b, form)?));
    }
    let pixel_count = match &mask {
        Some(m) => m.count(),
        None => a.width() * a.height(),
    };
    report.insert("pixel_count".into(), json!(pixel_count));
    Ok(serde_json::Value::Object(report).to_string())
}

fn as_environment(img: &ImageRGB) -> anyhow::Result<EnvironmentMap> {
    Ok(EnvironmentMap::new(img.width(), img.height(), img.pixels().to_vec())?)
}
