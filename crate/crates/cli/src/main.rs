//! `relight` - dataset synthesis and relighting toolkit.
//!
//! Exit codes: 0 success, 1 partial failures recorded in the dataset
//! manifest, 2 fatal errors (bad configuration, unreadable inputs,
//! degenerate metric inputs).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use relight_cli::commands::{
    run_compare, run_envtool, run_trace, CompareParams, EnvtoolOp, MetricKind, Pass, TraceParams,
};
use relight_cli::config::DatasetConfig;
use relight_cli::dataset::{generate_dataset, DatasetParams};
use relight_cli::relight::{run_relight, BackgroundSpec, RelightParams};
use relight_core::compose::RegionSpec;
use relight_core::mesh::{SmoothingConfig, SmoothingScheme};

#[derive(Parser)]
#[command(
    name = "relight",
    about = "Ray-traced relighting, G-buffer rendering and dataset synthesis under HDR environment lighting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render the full pose/lighting grid for every model in a config file.
    Dataset(DatasetArgs),
    /// Relight a mesh + albedo under a target environment map.
    Relight(RelightArgs),
    /// Trace G-buffer passes (mask, normal, depth, ao, shading) for a mesh.
    Trace(TraceArgs),
    /// Environment-map processing: rotate, downsample, sh-project.
    Envtool(EnvtoolArgs),
    /// Compare two images (and/or environment maps) with the evaluation metrics.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SmoothingArgs {
    /// Laplacian smoothing steps applied to the (body) mesh.
    #[arg(long, default_value_t = 10)]
    smooth_steps: usize,
    /// Smoothing weights: uniform or cotangent.
    #[arg(long, default_value = "cotangent")]
    smooth_scheme: String,
    /// Smoothing step size in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    smooth_lambda: f64,
}

impl SmoothingArgs {
    fn to_config(&self) -> anyhow::Result<SmoothingConfig> {
        let scheme = match self.smooth_scheme.as_str() {
            "uniform" => SmoothingScheme::Uniform,
            "cotangent" => SmoothingScheme::Cotangent,
            other => anyhow::bail!("unknown smoothing scheme {other:?}"),
        };
        Ok(SmoothingConfig { steps: self.smooth_steps, scheme, lambda: self.smooth_lambda })
    }
}

#[derive(Args)]
struct DatasetArgs {
    /// TOML config with the grid, environment pool and model list.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Overrides the seed from the config file.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 64)]
    spp: usize,
    /// Raster size as WxH.
    #[arg(long, default_value = "512x512")]
    size: String,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct RelightArgs {
    #[arg(long)]
    mesh: PathBuf,
    /// Pixel-aligned albedo image (.png gamma 2.2 or .pfm linear); its size
    /// fixes the raster.
    #[arg(long)]
    albedo: PathBuf,
    /// Target environment map (.hdr or .pfm).
    #[arg(long)]
    env: PathBuf,
    /// Separately reconstructed face mesh, traced without smoothing.
    #[arg(long)]
    face_mesh: Option<PathBuf>,
    /// Face compositing window as r0,c0,rows,cols (required with --face-mesh).
    #[arg(long)]
    region: Option<String>,
    /// Feather band width in pixels for the face composite.
    #[arg(long, default_value_t = 4)]
    feather: usize,
    /// Replace the background with the environment at this azimuth (degrees).
    #[arg(long)]
    bg_azimuth: Option<f64>,
    /// Vertical field of view of the background crop (degrees).
    #[arg(long, default_value_t = 45.0)]
    bg_fov: f64,
    #[arg(long, default_value_t = 0.0)]
    pitch: f64,
    #[arg(long, default_value_t = 0.0)]
    yaw: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 256)]
    spp: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    smoothing: SmoothingArgs,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    mesh: PathBuf,
    /// Environment map; required when tracing the shading pass.
    #[arg(long)]
    env: Option<PathBuf>,
    /// Comma-separated passes to write.
    #[arg(long, default_value = "mask,normal,depth,ao,shading")]
    passes: String,
    #[arg(long, default_value_t = 256)]
    spp: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value = "512x512")]
    size: String,
    #[arg(long, default_value_t = 0.0)]
    pitch: f64,
    #[arg(long, default_value_t = 0.0)]
    yaw: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    smoothing: SmoothingArgs,
}

#[derive(Args)]
struct EnvtoolArgs {
    #[command(subcommand)]
    op: EnvtoolCommand,
}

#[derive(Subcommand)]
enum EnvtoolCommand {
    /// Rotate the map about the vertical axis.
    Rotate {
        #[arg(long, value_name = "IN")]
        input: PathBuf,
        #[arg(long, value_name = "OUT")]
        output: PathBuf,
        #[arg(long)]
        degrees: f64,
    },
    /// Gaussian-pyramid reduction to a target size.
    Downsample {
        #[arg(long, value_name = "IN")]
        input: PathBuf,
        #[arg(long, value_name = "OUT")]
        output: PathBuf,
        /// Target size as WxH (dimensions must divide by a power of two).
        #[arg(long)]
        size: String,
    },
    /// Project onto spherical harmonics, writing [l, m, r, g, b] rows as JSON.
    ShProject {
        #[arg(long, value_name = "IN")]
        input: PathBuf,
        #[arg(long, value_name = "OUT")]
        output: PathBuf,
        /// SH order: 2 gives 9 coefficients, 4 gives 25.
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Foreground mask PNG; metrics are restricted to it.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Comma-separated metrics: mse,psnr,ssim,fft,light.
    #[arg(long, default_value = "mse,psnr,ssim")]
    metrics: String,
    /// FFT metric on magnitudes instead of complex components.
    #[arg(long)]
    fft_magnitude: bool,
    /// Light loss with the weight on the estimate only.
    #[arg(long)]
    light_asymmetric: bool,
}

fn parse_size(text: &str) -> anyhow::Result<(usize, usize)> {
    let (w, h) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| anyhow::anyhow!("size must look like 512x512, got {text:?}"))?;
    Ok((w.trim().parse()?, h.trim().parse()?))
}

fn parse_region(text: &str, feather: usize) -> anyhow::Result<RegionSpec> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        anyhow::bail!("region must be r0,c0,rows,cols, got {text:?}");
    }
    Ok(RegionSpec {
        row0: parts[0].parse()?,
        col0: parts[1].parse()?,
        rows: parts[2].parse()?,
        cols: parts[3].parse()?,
        feather,
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Dataset(args) => {
            let mut config = DatasetConfig::from_toml_file(&args.config)?;
            if let Some(seed) = args.seed {
                config.grid.seed = seed;
            }
            let (width, height) = parse_size(&args.size)?;
            let manifest = generate_dataset(&DatasetParams {
                grid: config.grid,
                models: config.models,
                out_dir: args.out_dir,
                spp: args.spp,
                width,
                height,
                jobs: args.jobs,
                smooth: None,
            })?;
            if manifest.has_failures() {
                eprintln!(
                    "{} of {} sets failed; see manifest.json",
                    manifest.failed_sets(),
                    manifest.sets.len()
                );
                Ok(ExitCode::from(1))
            } else {
                println!("{} sets written", manifest.sets.len());
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Relight(args) => {
            let region = match &args.region {
                Some(text) => Some(parse_region(text, args.feather)?),
                None => None,
            };
            let background = args
                .bg_azimuth
                .map(|azimuth_deg| BackgroundSpec { azimuth_deg, fov_deg: args.bg_fov });
            run_relight(&RelightParams {
                mesh: args.mesh,
                albedo: args.albedo,
                env: args.env,
                face_mesh: args.face_mesh,
                region,
                background,
                smooth: args.smoothing.to_config()?,
                pitch: args.pitch,
                yaw: args.yaw,
                scale: args.scale,
                spp: args.spp,
                seed: args.seed,
                out_dir: args.out_dir,
                jobs: args.jobs,
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Trace(args) => {
            let (width, height) = parse_size(&args.size)?;
            let smooth = args.smoothing.to_config()?;
            run_trace(&TraceParams {
                mesh: args.mesh,
                env: args.env,
                passes: Pass::parse_list(&args.passes)?,
                spp: args.spp,
                seed: args.seed,
                out_dir: args.out_dir,
                width,
                height,
                pitch: args.pitch,
                yaw: args.yaw,
                scale: args.scale,
                smooth,
                jobs: args.jobs,
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Envtool(args) => {
            let (input, output, op) = match args.op {
                EnvtoolCommand::Rotate { input, output, degrees } => {
                    (input, output, EnvtoolOp::Rotate { degrees })
                }
                EnvtoolCommand::Downsample { input, output, size } => {
                    let (width, height) = parse_size(&size)?;
                    (input, output, EnvtoolOp::Downsample { width, height })
                }
                EnvtoolCommand::ShProject { input, output, order } => {
                    (input, output, EnvtoolOp::ShProject { order })
                }
            };
            run_envtool(&input, &output, &op)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare(args) => {
            let line = run_compare(&CompareParams {
                a: args.a,
                b: args.b,
                mask: args.mask,
                metrics: MetricKind::parse_list(&args.metrics)?,
                fft_magnitude: args.fft_magnitude,
                light_asymmetric: args.light_asymmetric,
            })?;
            println!("{line}");
            Ok(ExitCode::SUCCESS)
        }
    }
}
