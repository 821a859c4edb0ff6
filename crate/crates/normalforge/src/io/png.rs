//! PNG ingestion (16-bit depth) and 8-bit normal visualization.

use std::path::Path;

use image::{ColorType, DynamicImage, ImageBuffer, Rgb};

use crate::error::{Error, Result};
use crate::image::{DepthImage, NormalMap, ScalarImage};

/// Read a 16-bit single-channel PNG as depth: `depth = raw * scale`, raw 0
/// is invalid (the usual millimeter-depth convention with scale 0.001).
pub fn read_png16_depth(path: &Path, scale: f64) -> Result<DepthImage> {
    if !(scale > 0.0) {
        return Err(Error::config("depth scale must be positive"));
    }
    let img = image::open(path)
        .map_err(|e| Error::format(path, 0, format!("cannot decode PNG: {e}")))?;
    let gray = match img {
        DynamicImage::ImageLuma16(g) => g,
        other => {
            return Err(Error::format(
                path,
                0,
                format!(
                    "expected 16-bit single-channel PNG, got {:?}",
                    other.color()
                ),
            ))
        }
    };
    let (w, h) = (gray.width() as usize, gray.height() as usize);
    let grid = ScalarImage::from_fn(w, h, |u, v| {
        let raw = gray.get_pixel(u as u32, v as u32).0[0];
        if raw == 0 {
            None
        } else {
            Some(raw as f64 * scale)
        }
    });
    Ok(DepthImage::new(grid))
}

/// Write a 16-bit single-channel depth PNG: `raw = round(depth / scale)`,
/// invalid pixels stored as raw 0. Values that would exceed u16 range error.
pub fn write_png16_depth(path: &Path, depth: &DepthImage, scale: f64) -> Result<()> {
    if !(scale > 0.0) {
        return Err(Error::config("depth scale must be positive"));
    }
    let (w, h) = (depth.width(), depth.height());
    let mut buf: ImageBuffer<image::Luma<u16>, Vec<u16>> =
        ImageBuffer::new(w as u32, h as u32);
    for v in 0..h {
        for u in 0..w {
            let raw = match depth.get(u, v) {
                Some(z) => {
                    let r = (z / scale).round();
                    if !(r >= 1.0 && r <= u16::MAX as f64) {
                        return Err(Error::invalid(format!(
                            "depth {z} at ({u},{v}) out of range for 16-bit PNG at scale {scale}"
                        )));
                    }
                    r as u16
                }
                None => 0,
            };
            buf.put_pixel(u as u32, v as u32, image::Luma([raw]));
        }
    }
    buf.save(path).map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::invalid(format!("cannot encode PNG: {other}")),
    })
}

/// Map one normal channel to a byte: `round(255 * (c + 1) / 2)`, round half
/// up.
fn channel_byte(c: f64) -> u8 {
    let x = 255.0 * (c + 1.0) / 2.0;
    // f64::round ties away from zero; x >= 0 here, so that is round-half-up.
    x.round().clamp(0.0, 255.0) as u8
}

/// Encode a normal map as the standard 8-bit visualization. Invalid pixels
/// encode as (0, 0, 0), which no unit normal maps to.
pub fn encode_normal_png(map: &NormalMap) -> ImageBuffer<Rgb<u8>, Vec<u8>> {
    let (w, h) = (map.width(), map.height());
    let mut buf = ImageBuffer::new(w as u32, h as u32);
    for v in 0..h {
        for u in 0..w {
            let px = match map.get(u, v) {
                Some(n) => Rgb([channel_byte(n.x), channel_byte(n.y), channel_byte(n.z)]),
                None => Rgb([0, 0, 0]),
            };
            buf.put_pixel(u as u32, v as u32, px);
        }
    }
    buf
}

/// Encode and write the visualization PNG.
pub fn write_normal_png(path: &Path, map: &NormalMap) -> Result<()> {
    let buf = encode_normal_png(map);
    image::save_buffer(
        path,
        buf.as_raw(),
        buf.width(),
        buf.height(),
        ColorType::Rgb8,
    )
    .map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => Error::invalid(format!("cannot encode PNG: {other}")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Vec3;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("normalforge_png_test");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn png16_roundtrip_exact() {
        let mut grid = ScalarImage::new(5, 4);
        grid.set(0, 0, 2.0); // raw 2000 at scale 0.001
        grid.set(1, 0, 65.535); // raw 65535
        grid.set(2, 3, 0.001); // raw 1
        let depth = DepthImage::new(grid);
        let path = tmp("d.png");
        write_png16_depth(&path, &depth, 0.001).unwrap();
        let back = read_png16_depth(&path, 0.001).unwrap();
        assert!((back.get(0, 0).unwrap() - 2.0).abs() < 1e-12);
        assert!((back.get(1, 0).unwrap() - 65.535).abs() < 1e-12);
        assert!((back.get(2, 3).unwrap() - 0.001).abs() < 1e-12);
        // raw 0 decodes as invalid
        assert!(back.get(3, 3).is_none());
        assert_eq!(back.grid().valid_count(), 3);
    }

    #[test]
    fn png16_out_of_range_rejected() {
        let depth = DepthImage::from_fn(2, 2, |_, _| Some(100.0));
        assert!(write_png16_depth(&tmp("big.png"), &depth, 0.001).is_err());
    }

    #[test]
    fn png16_wrong_format_rejected() {
        let path = tmp("rgb.png");
        let buf: ImageBuffer<Rgb<u8>, Vec<u8>> = ImageBuffer::new(2, 2);
        buf.save(&path).unwrap();
        assert!(read_png16_depth(&path, 0.001).is_err());
    }

    #[test]
    fn normal_encoding_spot_values() {
        let mut map = NormalMap::new(3, 1);
        map.set(0, 0, Vec3::new(0.0, 0.0, -1.0));
        map.set(1, 0, Vec3::new(1.0, 0.0, 0.0));
        let img = encode_normal_png(&map);
        assert_eq!(img.get_pixel(0, 0).0, [128, 128, 0]);
        assert_eq!(img.get_pixel(1, 0).0, [255, 128, 128]);
        // invalid sentinel
        assert_eq!(img.get_pixel(2, 0).0, [0, 0, 0]);
    }

    #[test]
    fn valid_unit_normal_never_black() {
        // |n| = 1 means at least one channel is at least 1/sqrt(3) in
        // magnitude; a channel maps to 0 only below about -0.996.
        let dirs = [
            Vec3::new(-1.0, 0.0, 0.0),
            Vec3::new(0.0, -1.0, 0.0),
            Vec3::new(0.0, 0.0, -1.0),
            Vec3::new(-0.577, -0.577, -0.577),
        ];
        let mut map = NormalMap::new(dirs.len(), 1);
        for (i, d) in dirs.iter().enumerate() {
            map.set(i, 0, d.normalized().unwrap());
        }
        let img = encode_normal_png(&map);
        for i in 0..dirs.len() {
            assert_ne!(img.get_pixel(i as u32, 0).0, [0, 0, 0]);
        }
    }
}
