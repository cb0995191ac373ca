//! PNG planes: 8-bit masks, 16-bit encoded normals and gamma-2.2 color.

use std::path::Path;

use image::{GrayImage, ImageBuffer, Luma, Rgb, RgbImage};

use crate::compose::{ImageRGB, Mask};
use crate::error::{CoreError, Result};
use crate::tracer::GBuffer;

pub fn write_mask_png(path: &Path, mask: &Mask) -> Result<()> {
    let img = GrayImage::from_fn(mask.width() as u32, mask.height() as u32, |x, y| {
        Luma([if mask.get(y as usize, x as usize) { 255u8 } else { 0 }])
    });
    img.save(path)?;
    Ok(())
}

pub fn read_mask_png(path: &Path) -> Result<Mask> {
    let img = image::open(path)?.into_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = img.pixels().map(|Luma([v])| *v >= 128).collect();
    Mask::new(w, h, data)
}

/// Normals encoded as (n + 1) / 2 into 16-bit RGB.
pub fn write_normal_png(path: &Path, gbuffer: &GBuffer) -> Result<()> {
    let (w, h) = (gbuffer.width(), gbuffer.height());
    let img: ImageBuffer<Rgb<u16>, Vec<u16>> = ImageBuffer::from_fn(w as u32, h as u32, |x, y| {
        let n = gbuffer.normal()[y as usize * w + x as usize];
        Rgb(n.map(|v| (((v + 1.0) / 2.0).clamp(0.0, 1.0) * 65535.0).round() as u16))
    });
    img.save(path)?;
    Ok(())
}

/// Decodes a 16-bit normal PNG back to unit-range vectors (not renormalized).
pub fn read_normal_png(path: &Path) -> Result<(usize, usize, Vec<[f64; 3]>)> {
    let img = image::open(path)?.into_rgb16();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = img
        .pixels()
        .map(|Rgb(ch)| ch.map(|v| v as f64 / 65535.0 * 2.0 - 1.0))
        .collect();
    Ok((w, h, data))
}

/// Gamma-2.2 encode to 8-bit RGB; values clamp to [0, 1] first.
pub fn write_srgb_png(path: &Path, img: &ImageRGB) -> Result<()> {
    let out = RgbImage::from_fn(img.width() as u32, img.height() as u32, |x, y| {
        let px = img.at(y as usize, x as usize);
        Rgb(px.map(|v| (v.clamp(0.0, 1.0).powf(1.0 / 2.2) * 255.0).round() as u8))
    });
    out.save(path)?;
    Ok(())
}

/// Decodes an 8-bit PNG to linear values through the same gamma-2.2 curve.
/// A PNG alpha channel, when present, becomes the image mask.
pub fn read_srgb_png(path: &Path) -> Result<ImageRGB> {
    let dynamic = image::open(path)?;
    let rgba = dynamic.into_rgba8();
    let (w, h) = (rgba.width() as usize, rgba.height() as usize);
    let mut data = Vec::with_capacity(w * h);
    let mut mask = Vec::with_capacity(w * h);
    let mut has_alpha = false;
    for px in rgba.pixels() {
        let [r, g, b, a] = px.0;
        data.push([decode(r), decode(g), decode(b)]);
        if a != 255 {
            has_alpha = true;
        }
        mask.push(a as f64 / 255.0);
    }
    let img = ImageRGB::new(w, h, data)?;
    if has_alpha {
        img.with_mask(mask)
    } else {
        Ok(img)
    }
}

fn decode(v: u8) -> f64 {
    (v as f64 / 255.0).powf(2.2)
}

/// Single-channel plane (ao, depth) helpers shared by the CLI.
pub fn plane_to_f32(plane: &[f64]) -> Vec<f32> {
    plane.iter().map(|&v| v as f32).collect()
}

pub fn rgb_plane_to_f32(plane: &[[f64; 3]]) -> Vec<f32> {
    let mut out = Vec::with_capacity(plane.len() * 3);
    for px in plane {
        out.extend(px.map(|v| v as f32));
    }
    out
}

pub fn f32_to_rgb_plane(data: &[f32]) -> Result<Vec<[f64; 3]>> {
    if data.len() % 3 != 0 {
        return Err(CoreError::Shape("RGB plane length not divisible by 3".into()));
    }
    Ok(data
        .chunks_exact(3)
        .map(|c| [c[0] as f64, c[1] as f64, c[2] as f64])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mask.png");
        let mask = Mask::new(5, 3, (0..15).map(|i| i % 2 == 0).collect()).unwrap();
        write_mask_png(&path, &mask).unwrap();
        let back = read_mask_png(&path).unwrap();
        assert_eq!(mask, back);
    }

    #[test]
    fn srgb_round_trip_is_close() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.png");
        let img = ImageRGB::new(
            2,
            2,
            vec![[0.0; 3], [0.25, 0.5, 0.75], [1.0; 3], [0.01, 0.99, 0.5]],
        )
        .unwrap();
        write_srgb_png(&path, &img).unwrap();
        let back = read_srgb_png(&path).unwrap();
        for (a, b) in img.pixels().iter().zip(back.pixels()) {
            for ch in 0..3 {
                assert!((a[ch] - b[ch]).abs() < 0.01, "{} vs {}", a[ch], b[ch]);
            }
        }
    }
}
