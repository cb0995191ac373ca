//! Orchestration for the relight toolkit: dataset-grid synthesis, the
//! end-to-end relight pipeline, pose cameras, configuration handling and
//! the runners behind the CLI subcommands.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod jobs;
pub mod pose;
pub mod relight;

pub use config::{DatasetConfig, DatasetGrid, ModelSpec};
pub use dataset::{generate_dataset, DatasetParams, Manifest};
pub use pose::camera_from_pose;
pub use relight::{run_relight, RelightParams};
