//! Portable float map (PFM) reader/writer.
//!
//! Header: `PF` (3-channel) or `Pf` (1-channel), then `<width> <height>`,
//! then a nonzero scale whose sign gives the byte order (negative =
//! little-endian). Rows are stored bottom-up. Invalid pixels are quiet NaNs
//! on disk; the mask is reconstructed at load.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{NormalMap, ScalarImage};
use crate::math::Vec3;

/// Parsed PFM header.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfmHeader {
    pub channels: u8,
    pub width: usize,
    pub height: usize,
    pub scale: f64,
}

impl PfmHeader {
    pub fn little_endian(&self) -> bool {
        self.scale < 0.0
    }
}

/// Read one whitespace-delimited token, tracking the byte offset for error
/// reporting. PFM headers use single-byte separators.
fn read_token(data: &[u8], offset: &mut usize, path: &Path) -> Result<String> {
    while *offset < data.len() && data[*offset].is_ascii_whitespace() {
        *offset += 1;
    }
    let start = *offset;
    while *offset < data.len() && !data[*offset].is_ascii_whitespace() {
        *offset += 1;
    }
    if start == *offset {
        return Err(Error::format(path, start as u64, "unexpected end of header"));
    }
    String::from_utf8(data[start..*offset].to_vec())
        .map_err(|_| Error::format(path, start as u64, "non-UTF-8 header token"))
}

fn parse_header(data: &[u8], path: &Path) -> Result<(PfmHeader, usize)> {
    let mut offset = 0usize;
    let magic = read_token(data, &mut offset, path)?;
    let channels = match magic.as_str() {
        "PF" => 3,
        "Pf" => 1,
        other => {
            return Err(Error::format(
                path,
                0,
                format!("bad magic '{other}' (expected PF or Pf)"),
            ))
        }
    };
    let dim_at = offset;
    let width: usize = read_token(data, &mut offset, path)?
        .parse()
        .map_err(|e| Error::format(path, dim_at as u64, format!("bad width: {e}")))?;
    let h_at = offset;
    let height: usize = read_token(data, &mut offset, path)?
        .parse()
        .map_err(|e| Error::format(path, h_at as u64, format!("bad height: {e}")))?;
    let s_at = offset;
    let scale: f64 = read_token(data, &mut offset, path)?
        .parse()
        .map_err(|e| Error::format(path, s_at as u64, format!("bad scale: {e}")))?;
    if width == 0 || height == 0 {
        return Err(Error::format(path, dim_at as u64, "zero dimension"));
    }
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::format(path, s_at as u64, "scale must be nonzero and finite"));
    }
    // Exactly one whitespace byte separates the header from the payload.
    if offset >= data.len() || !data[offset].is_ascii_whitespace() {
        return Err(Error::format(path, offset as u64, "missing header terminator"));
    }
    offset += 1;
    Ok((
        PfmHeader {
            channels,
            width,
            height,
            scale,
        },
        offset,
    ))
}

fn read_payload(path: &Path) -> Result<(PfmHeader, Vec<f32>)> {
    let mut data = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut data))
        .map_err(|e| Error::io(path, e))?;
    let (header, start) = parse_header(&data, path)?;
    let count = header.width * header.height * header.channels as usize;
    let need = count * 4;
    if data.len() - start < need {
        return Err(Error::format(
            path,
            data.len() as u64,
            format!("truncated payload: need {need} bytes, have {}", data.len() - start),
        ));
    }
    let le = header.little_endian();
    let mut values = Vec::with_capacity(count);
    for i in 0..count {
        let b: [u8; 4] = data[start + 4 * i..start + 4 * i + 4].try_into().unwrap();
        values.push(if le {
            f32::from_le_bytes(b)
        } else {
            f32::from_be_bytes(b)
        });
    }
    Ok((header, values))
}

fn write_payload(path: &Path, channels: u8, width: usize, height: usize, values: &[f32]) -> Result<()> {
    let magic = if channels == 3 { "PF" } else { "Pf" };
    let mut out = Vec::with_capacity(32 + values.len() * 4);
    write!(out, "{magic}\n{width} {height}\n-1.0\n").unwrap();
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Bottom-up row index for disk row `r` of an image of height `h`.
fn flip(r: usize, h: usize) -> usize {
    h - 1 - r
}

/// Write a 1-channel image; invalid pixels become NaN.
pub fn write_pfm_scalar(path: &Path, img: &ScalarImage) -> Result<()> {
    let (w, h) = (img.width(), img.height());
    let mut values = Vec::with_capacity(w * h);
    for disk_row in 0..h {
        let v = flip(disk_row, h);
        for u in 0..w {
            values.push(match img.get(u, v) {
                Some(x) => x as f32,
                None => f32::NAN,
            });
        }
    }
    write_payload(path, 1, w, h, &values)
}

/// Read a 1-channel image; NaNs become invalid pixels.
pub fn read_pfm_scalar(path: &Path) -> Result<ScalarImage> {
    let (header, values) = read_payload(path)?;
    if header.channels != 1 {
        return Err(Error::format(path, 0, "expected 1-channel PFM (Pf)"));
    }
    let (w, h) = (header.width, header.height);
    let mut img = ScalarImage::new(w, h);
    for disk_row in 0..h {
        let v = flip(disk_row, h);
        for u in 0..w {
            let x = values[disk_row * w + u] as f64;
            if x.is_finite() {
                img.set(u, v, x);
            }
        }
    }
    Ok(img)
}

/// Write a normal map as a 3-channel PFM; invalid pixels are NaN triples.
pub fn write_pfm_normals(path: &Path, map: &NormalMap) -> Result<()> {
    let (w, h) = (map.width(), map.height());
    let mut values = Vec::with_capacity(w * h * 3);
    for disk_row in 0..h {
        let v = flip(disk_row, h);
        for u in 0..w {
            match map.get(u, v) {
                Some(n) => {
                    values.extend_from_slice(&[n.x as f32, n.y as f32, n.z as f32]);
                }
                None => values.extend_from_slice(&[f32::NAN; 3]),
            }
        }
    }
    write_payload(path, 3, w, h, &values)
}

/// Read a 3-channel PFM as a normal map; any NaN channel invalidates the
/// pixel.
pub fn read_pfm_normals(path: &Path) -> Result<NormalMap> {
    let (header, values) = read_payload(path)?;
    if header.channels != 3 {
        return Err(Error::format(path, 0, "expected 3-channel PFM (PF)"));
    }
    let (w, h) = (header.width, header.height);
    let mut map = NormalMap::new(w, h);
    for disk_row in 0..h {
        let v = flip(disk_row, h);
        for u in 0..w {
            let i = (disk_row * w + u) * 3;
            let n = Vec3::new(values[i] as f64, values[i + 1] as f64, values[i + 2] as f64);
            if n.is_finite() {
                map.set(u, v, n);
            }
        }
    }
    Ok(map)
}
