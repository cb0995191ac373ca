//! Radiance HDR (.hdr, RGBE) input and output via the `image` codecs.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use image::codecs::hdr::{HdrDecoder, HdrEncoder};
use image::{DynamicImage, Rgb};

use crate::envlight::EnvironmentMap;
use crate::error::Result;

pub fn read_hdr(path: &Path) -> Result<EnvironmentMap> {
    let decoder = HdrDecoder::new(BufReader::new(File::open(path)?))?;
    let img = DynamicImage::from_decoder(decoder)?.into_rgb32f();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let radiance = img
        .pixels()
        .map(|Rgb([r, g, b])| [*r as f64, *g as f64, *b as f64])
        .collect();
    EnvironmentMap::new(w, h, radiance)
}

pub fn write_hdr(path: &Path, map: &EnvironmentMap) -> Result<()> {
    let pixels: Vec<Rgb<f32>> = map
        .texels()
        .iter()
        .map(|px| Rgb([px[0] as f32, px[1] as f32, px[2] as f32]))
        .collect();
    let writer = BufWriter::new(File::create(path)?);
    HdrEncoder::new(writer).encode(&pixels, map.width(), map.height())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_within_rgbe_precision() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("env.hdr");
        // RGBE shares one exponent per pixel, so keep channels within a
        // couple of orders of magnitude of each other.
        let mut radiance = Vec::new();
        for i in 0..8 * 4 {
            let v = 0.01 + i as f64 * 0.37;
            radiance.push([v, v * 2.0, v * 20.0 + 0.005]);
        }
        let map = EnvironmentMap::new(8, 4, radiance).unwrap();
        write_hdr(&path, &map).unwrap();
        let back = read_hdr(&path).unwrap();
        assert_eq!((back.width(), back.height()), (8, 4));
        for (a, b) in map.texels().iter().zip(back.texels()) {
            // Precision is relative to the pixel's brightest channel (the
            // shared exponent), roughly 8 mantissa bits.
            let scale = a.iter().fold(1e-3f64, |m, &v| m.max(v));
            for ch in 0..3 {
                assert!((a[ch] - b[ch]).abs() / scale < 0.01, "{} vs {}", a[ch], b[ch]);
            }
        }
    }
}
