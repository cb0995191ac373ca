//! Dataset configuration: the pose/lighting grid and the model list,
//! loadable from a TOML file with CLI overrides applied on top.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

/// The synthesis grid. Defaults reproduce the 4 pitches x 9 yaws x
/// 3 scales x 2 lightings = 216 sets-per-model recipe.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetGrid {
    #[serde(default = "default_pitches")]
    pub pitches: Vec<f64>,
    #[serde(default = "default_yaws")]
    pub yaws: Vec<f64>,
    #[serde(default = "default_scales")]
    pub scales: Vec<f64>,
    #[serde(default = "default_lightings")]
    pub lightings_per_pose: usize,
    #[serde(default)]
    pub env_pool: Vec<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

fn default_pitches() -> Vec<f64> {
    vec![0.0, 10.0, 20.0, 30.0]
}

fn default_yaws() -> Vec<f64> {
    vec![-32.0, -24.0, -16.0, -8.0, 0.0, 8.0, 16.0, 24.0, 32.0]
}

fn default_scales() -> Vec<f64> {
    vec![0.8, 1.0, 1.1]
}

fn default_lightings() -> usize {
    2
}

impl Default for DatasetGrid {
    fn default() -> Self {
        DatasetGrid {
            pitches: default_pitches(),
            yaws: default_yaws(),
            scales: default_scales(),
            lightings_per_pose: default_lightings(),
            env_pool: Vec::new(),
            seed: 0,
        }
    }
}

impl DatasetGrid {
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.pitches.is_empty() || self.yaws.is_empty() || self.scales.is_empty() {
            bail!("pitches, yaws and scales must all be non-empty");
        }
        if self.lightings_per_pose == 0 {
            bail!("lightings_per_pose must be at least 1");
        }
        if self.env_pool.is_empty() {
            bail!("env_pool must list at least one environment map");
        }
        if self.lightings_per_pose > self.env_pool.len() {
            bail!(
                "cannot draw {} lightings without replacement from a pool of {}",
                self.lightings_per_pose,
                self.env_pool.len()
            );
        }
        Ok(())
    }

    pub fn pose_count(&self) -> usize {
        self.pitches.len() * self.yaws.len() * self.scales.len()
    }

    /// Sets per model: |pitches| * |yaws| * |scales| * lightings_per_pose.
    pub fn sets_per_model(&self) -> usize {
        self.pose_count() * self.lightings_per_pose
    }

    /// Poses in deterministic (pitch, yaw, scale) iteration order.
    pub fn poses(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.pose_count());
        for &p in &self.pitches {
            for &y in &self.yaws {
                for &s in &self.scales {
                    out.push((p, y, s));
                }
            }
        }
        out
    }
}

/// One input model: a mesh plus its flat ground-truth albedo color.
/// Synthesis has no textures, so albedo is constant over the foreground.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    pub mesh: PathBuf,
    #[serde(default = "default_albedo")]
    pub albedo: [f64; 3],
}

fn default_albedo() -> [f64; 3] {
    [0.8, 0.8, 0.8]
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct DatasetConfig {
    #[serde(default)]
    pub grid: DatasetGrid,
    #[serde(default)]
    pub models: Vec<ModelSpec>,
}

impl DatasetConfig {
    pub fn from_toml_file(path: &Path) -> anyhow::Result<DatasetConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: DatasetConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        // Relative paths in the config resolve against the config directory.
        if let Some(dir) = path.parent() {
            for env in &mut cfg.grid.env_pool {
                if env.is_relative() {
                    *env = dir.join(&env);
                }
            }
            for model in &mut cfg.models {
                if model.mesh.is_relative() {
                    model.mesh = dir.join(&model.mesh);
                }
            }
        }
        Ok(cfg)
    }
}
