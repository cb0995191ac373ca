//! The end-to-end relighting pipeline: smooth the body mesh, trace shading
//! under the target environment, optionally composite a separately traced
//! face pass, multiply with the albedo and substitute the background.

use std::path::PathBuf;

use anyhow::{bail, Context};

use relight_core::compose::{
    compose_relit, composite_background, composite_region, RegionSpec,
};
use relight_core::envlight::EnvSampler;
use relight_core::io;
use relight_core::mesh::{laplacian_smooth, load_obj, SmoothingConfig};
use relight_core::{GBuffer, ImageRGB, RenderConfig, Scene};

use crate::jobs::with_jobs;
use crate::pose::camera_from_pose;

#[derive(Debug, Clone, Copy)]
pub struct BackgroundSpec {
    pub azimuth_deg: f64,
    pub fov_deg: f64,
}

#[derive(Debug, Clone)]
pub struct RelightParams {
    pub mesh: PathBuf,
    pub albedo: PathBuf,
    pub env: PathBuf,
    pub face_mesh: Option<PathBuf>,
    pub region: Option<RegionSpec>,
    pub background: Option<BackgroundSpec>,
    pub smooth: SmoothingConfig,
    pub pitch: f64,
    pub yaw: f64,
    pub scale: f64,
    pub spp: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub jobs: Option<usize>,
}

impl Default for RelightParams {
    fn default() -> Self {
        RelightParams {
            mesh: PathBuf::new(),
            albedo: PathBuf::new(),
            env: PathBuf::new(),
            face_mesh: None,
            region: None,
            background: None,
            smooth: SmoothingConfig::default(),
            pitch: 0.0,
            yaw: 0.0,
            scale: 1.0,
            spp: 256,
            seed: 0,
            out_dir: PathBuf::new(),
            jobs: None,
        }
    }
}

pub struct RelightOutputs {
    pub relit: ImageRGB,
    pub shading: ImageRGB,
    pub gbuffer: GBuffer,
}

pub fn run_relight(params: &RelightParams) -> anyhow::Result<RelightOutputs> {
    if params.face_mesh.is_some() != params.region.is_some() {
        bail!("--face-mesh and --region must be given together");
    }

    let albedo = io::load_image(&params.albedo)
        .with_context(|| format!("loading albedo {}", params.albedo.display()))?;
    let (width, height) = (albedo.width(), albedo.height());

    let env = io::load_environment(&params.env)
        .with_context(|| format!("loading environment {}", params.env.display()))?;
    let sampler = EnvSampler::build(&env)?;

    let mesh = load_obj(&params.mesh)
        .with_context(|| format!("loading mesh {}", params.mesh.display()))?;
    let smoothed = laplacian_smooth(&mesh, &params.smooth)?;
    let scene = Scene::new(smoothed)?;
    let camera = camera_from_pose(
        params.pitch,
        params.yaw,
        params.scale,
        &scene.mesh().bounds(),
        width,
        height,
    )?;
    let cfg = RenderConfig { spp: params.spp, seed: params.seed, ..RenderConfig::default() };

    let (gbuffer, face_pass) = with_jobs(params.jobs, || -> anyhow::Result<_> {
        let mut g = scene.render_geometry(&camera, &cfg)?;
        scene.render_shading(&camera, &sampler, &cfg, &mut g)?;
        let face = match &params.face_mesh {
            Some(path) => {
                // The face model goes to the renderer as-is, no smoothing.
                let face_mesh = load_obj(path)
                    .with_context(|| format!("loading face mesh {}", path.display()))?;
                Some(relight_core::tracer::render_face_pass(
                    &face_mesh, &camera, &sampler, &cfg,
                )?)
            }
            None => None,
        };
        Ok((g, face))
    })?;

    let body_shading = gbuffer.shading_image();
    let final_shading = match (&face_pass, &params.region) {
        (Some(face), Some(region)) => {
            region.validate(width, height)?;
            let patch = face_patch(&body_shading, face, region);
            composite_region(&body_shading, &patch, region)?
        }
        _ => body_shading.clone(),
    };

    let relit = compose_relit(&albedo, &final_shading)?;
    // Foreground mask for background substitution: the albedo's own alpha
    // when present, the traced body mask otherwise.
    let fg_mask: Vec<f64> = match albedo.mask() {
        Some(m) => m.to_vec(),
        None => gbuffer.mask().iter().map(|&m| if m { 1.0 } else { 0.0 }).collect(),
    };
    let relit = relit.with_mask(fg_mask)?;

    std::fs::create_dir_all(&params.out_dir)?;
    let out = |name: &str| params.out_dir.join(name);
    io::write_mask_png(&out("mask.png"), &gbuffer.mask_plane())?;
    io::write_normal_png(&out("normal.png"), &gbuffer)?;
    io::write_pfm(
        &out("depth.pfm"),
        gbuffer.width(),
        gbuffer.height(),
        1,
        &io::plane_to_f32(gbuffer.depth()),
    )?;
    io::save_image(&out("shading_body.pfm"), &body_shading)?;
    if let Some(face) = &face_pass {
        io::save_image(&out("shading_face.pfm"), &face.shading_image())?;
    }
    io::save_image(&out("shading.pfm"), &final_shading)?;
    io::save_image(&out("relit.pfm"), &relit)?;
    io::save_image(&out("relit.png"), &relit)?;

    if let Some(bg) = &params.background {
        let composed = composite_background(
            &relit,
            &env,
            bg.azimuth_deg.to_radians(),
            bg.fov_deg.to_radians(),
        )?;
        io::save_image(&out("relit_bg.pfm"), &composed)?;
        io::save_image(&out("relit_bg.png"), &composed)?;
    }

    Ok(RelightOutputs { relit, shading: final_shading, gbuffer })
}

/// Crop of the face-pass shading over the region, falling back to the body
/// shading wherever the face mesh does not cover a region pixel (the face
/// pass has holes there, unlike a refinement network's inpainted output).
fn face_patch(body: &ImageRGB, face: &GBuffer, region: &RegionSpec) -> ImageRGB {
    let mut data = Vec::with_capacity(region.rows * region.cols);
    for r in 0..region.rows {
        for c in 0..region.cols {
            let row = region.row0 + r;
            let col = region.col0 + c;
            let idx = row * face.width() + col;
            if face.mask()[idx] {
                data.push(face.shading()[idx]);
            } else {
                data.push(body.at(row, col));
            }
        }
    }
    ImageRGB::new(region.cols, region.rows, data).expect("face patch is finite")
}
