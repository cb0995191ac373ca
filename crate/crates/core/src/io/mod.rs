//! File formats: Radiance HDR and PFM for linear data, PNG for masks,
//! encoded normals and gamma-2.2 color.

mod hdr;
mod pfm;
mod png;

pub use hdr::{read_hdr, write_hdr};
pub use pfm::{read_pfm, write_pfm, PfmData};
pub use png::{
    f32_to_rgb_plane, plane_to_f32, read_mask_png, read_normal_png, read_srgb_png,
    rgb_plane_to_f32, write_mask_png, write_normal_png, write_srgb_png,
};

use std::path::Path;

use crate::compose::ImageRGB;
use crate::envlight::EnvironmentMap;
use crate::error::{CoreError, Result};

/// Loads an environment map by extension: `.hdr` or `.pfm`.
pub fn load_environment(path: &Path) -> Result<EnvironmentMap> {
    match extension(path)?.as_str() {
        "hdr" => read_hdr(path),
        "pfm" => {
            let pfm = read_pfm(path)?;
            if pfm.channels != 3 {
                return Err(CoreError::Shape("environment PFM must be 3-channel".into()));
            }
            EnvironmentMap::new(pfm.width, pfm.height, f32_to_rgb_plane(&pfm.data)?)
        }
        other => Err(CoreError::Structure(format!(
            "unsupported environment format .{other} (want .hdr or .pfm)"
        ))),
    }
}

/// Writes an environment map by extension: `.hdr` or `.pfm`.
pub fn save_environment(path: &Path, map: &EnvironmentMap) -> Result<()> {
    match extension(path)?.as_str() {
        "hdr" => write_hdr(path, map),
        "pfm" => write_pfm(
            path,
            map.width(),
            map.height(),
            3,
            &rgb_plane_to_f32(map.texels()),
        ),
        other => Err(CoreError::Structure(format!(
            "unsupported environment format .{other} (want .hdr or .pfm)"
        ))),
    }
}

/// Loads a color image by extension: linear `.pfm`/`.hdr` or gamma `.png`.
pub fn load_image(path: &Path) -> Result<ImageRGB> {
    match extension(path)?.as_str() {
        "pfm" => {
            let pfm = read_pfm(path)?;
            if pfm.channels != 3 {
                return Err(CoreError::Shape("image PFM must be 3-channel".into()));
            }
            ImageRGB::new(pfm.width, pfm.height, f32_to_rgb_plane(&pfm.data)?)
        }
        "hdr" => {
            let env = read_hdr(path)?;
            ImageRGB::new(env.width(), env.height(), env.texels().to_vec())
        }
        "png" => read_srgb_png(path),
        other => Err(CoreError::Structure(format!(
            "unsupported image format .{other} (want .pfm, .hdr or .png)"
        ))),
    }
}

/// Writes a color image by extension: linear `.pfm` or gamma-2.2 `.png`.
pub fn save_image(path: &Path, img: &ImageRGB) -> Result<()> {
    match extension(path)?.as_str() {
        "pfm" => write_pfm(
            path,
            img.width(),
            img.height(),
            3,
            &rgb_plane_to_f32(img.pixels()),
        ),
        "png" => write_srgb_png(path, img),
        other => Err(CoreError::Structure(format!(
            "unsupported image format .{other} (want .pfm or .png)"
        ))),
    }
}

fn extension(path: &Path) -> Result<String> {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .ok_or_else(|| CoreError::Structure(format!("{} has no file extension", path.display())))
}
