//! Portable FloatMap (PFM) reading and writing.
//!
//! `PF` is 3-channel, `Pf` single-channel. Rows are stored bottom-to-top;
//! a negative scale marks little-endian data, which is what we write.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{CoreError, Result};

pub struct PfmData {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    /// Row-major, top row first (flipped from file order on read).
    pub data: Vec<f32>,
}

pub fn read_pfm(path: &Path) -> Result<PfmData> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;

    let mut pos = 0usize;
    let magic = next_token(&bytes, &mut pos)?;
    let channels = match magic.as_str() {
        "PF" => 3,
        "Pf" => 1,
        other => {
            return Err(CoreError::Parse { line: 1, msg: format!("not a PFM file: {other:?}") })
        }
    };
    let width: usize = parse_token(&bytes, &mut pos, "width")?;
    let height: usize = parse_token(&bytes, &mut pos, "height")?;
    let scale: f64 = parse_token(&bytes, &mut pos, "scale")?;
    if width == 0 || height == 0 {
        return Err(CoreError::Shape("PFM with zero dimension".into()));
    }
    let little_endian = scale < 0.0;

    let expected = width * height * channels * 4;
    let payload = &bytes[pos..];
    if payload.len() < expected {
        return Err(CoreError::Parse {
            line: 1,
            msg: format!("PFM payload truncated: {} < {expected}", payload.len()),
        });
    }

    let mut data = vec![0.0f32; width * height * channels];
    let row_len = width * channels;
    for file_row in 0..height {
        let out_row = height - 1 - file_row; // file rows are bottom-up
        for i in 0..row_len {
            let at = (file_row * row_len + i) * 4;
            let raw: [u8; 4] = payload[at..at + 4].try_into().unwrap();
            let v = if little_endian {
                f32::from_le_bytes(raw)
            } else {
                f32::from_be_bytes(raw)
            };
            data[out_row * row_len + i] = v;
        }
    }
    Ok(PfmData { width, height, channels, data })
}

pub fn write_pfm(path: &Path, width: usize, height: usize, channels: usize, data: &[f32]) -> Result<()> {
    if data.len() != width * height * channels || !(channels == 1 || channels == 3) {
        return Err(CoreError::Shape("PFM buffer does not match dimensions".into()));
    }
    let mut writer = BufWriter::new(File::create(path)?);
    let magic = if channels == 3 { "PF" } else { "Pf" };
    write!(writer, "{magic}\n{width} {height}\n-1.0\n")?;
    let row_len = width * channels;
    for file_row in 0..height {
        let src_row = height - 1 - file_row;
        for i in 0..row_len {
            writer.write_all(&data[src_row * row_len + i].to_le_bytes())?;
        }
    }
    writer.flush()?;
    Ok(())
}

fn next_token(bytes: &[u8], pos: &mut usize) -> Result<String> {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(CoreError::Parse { line: 1, msg: "unexpected end of PFM header".into() });
    }
    let token = std::str::from_utf8(&bytes[start..*pos])
        .map_err(|_| CoreError::Parse { line: 1, msg: "non-ascii PFM header".into() })?
        .to_string();
    // Exactly one whitespace byte separates the scale from the payload.
    *pos += 1;
    Ok(token)
}

fn parse_token<T: std::str::FromStr>(bytes: &[u8], pos: &mut usize, what: &str) -> Result<T> {
    // The separator consumed by next_token only matters after the scale
    // token, where it is required to be a single byte; within the header any
    // surrounding whitespace is skipped on the next call.
    let token = next_token(bytes, pos)?;
    token.parse().map_err(|_| CoreError::Parse {
        line: 1,
        msg: format!("bad PFM {what}: {token:?}"),
    })
}
