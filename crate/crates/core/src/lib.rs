//! Geometry-aware relighting core: ray-traced G-buffers (mask, depth,
//! normal, ambient occlusion, shading) under HDR environment lighting with a
//! pixel-aligned orthographic camera, spherical-harmonics lighting
//! baselines, Laplacian mesh smoothing, environment-map processing, relit
//! compositing and evaluation metrics.
//!
//! Everything is deterministic: identical inputs and seeds produce
//! bit-identical outputs regardless of worker count.

pub mod compose;
pub mod envlight;
pub mod error;
pub mod io;
pub mod math;
pub mod mesh;
pub mod metrics;
pub mod tracer;

pub use compose::{ImageRGB, Mask, RegionSpec};
pub use envlight::{EnvSampler, EnvironmentMap, SHCoefficients, SolidAngleWeights};
pub use error::{CoreError, Result};
pub use math::{Aabb, Vec3};
pub use mesh::{SmoothingConfig, SmoothingScheme, TriangleMesh};
pub use metrics::MetricReport;
pub use tracer::{GBuffer, OrthoCamera, RenderConfig, Scene};
