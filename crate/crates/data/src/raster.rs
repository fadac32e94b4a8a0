//! Raster IO: 8-bit grayscale/RGB PNG and PGM/PPM via the `image` crate,
//! plus a small self-describing dump format for lossless float maps:
//! magic b"BDCNMAP1", then h and w as u64 little-endian, then row-major
//! little-endian f32 data.

use std::path::Path;

use bdcn_tensor::{EdgeProbMap, Shape4, Tensor4};
use image::{DynamicImage, ImageBuffer, Luma};

use crate::error::{DataError, Result};

pub const MAP_MAGIC: &[u8; 8] = b"BDCNMAP1";

fn open(path: &Path) -> Result<DynamicImage> {
    image::open(path).map_err(|e| DataError::Raster {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Load an image as a (1, 3, h, w) tensor in [0, 1]; grayscale inputs are
/// replicated to three channels.
pub fn load_image_rgb(path: &Path) -> Result<Tensor4> {
    let img = open(path)?.to_rgb8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let shape = Shape4::new(1, 3, h, w)?;
    let mut t = Tensor4::zeros(shape);
    let plane = h * w;
    {
        let data = t.data_mut();
        for (i, px) in img.pixels().enumerate() {
            data[i] = px.0[0] as f32 / 255.0;
            data[plane + i] = px.0[1] as f32 / 255.0;
            data[2 * plane + i] = px.0[2] as f32 / 255.0;
        }
    }
    Ok(t)
}

/// Load a raster as a single-channel map in [0, 1] (luma for RGB inputs).
pub fn load_map(path: &Path) -> Result<EdgeProbMap> {
    let img = open(path)?.to_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = img.pixels().map(|p| p.0[0] as f32 / 255.0).collect();
    Ok(EdgeProbMap::from_vec(h, w, data)?)
}

/// Write a (1, 3, h, w) tensor in [0, 1] as an 8-bit RGB PNG.
pub fn save_image_rgb(path: &Path, t: &Tensor4) -> Result<()> {
    let s = t.shape();
    let mut img = image::RgbImage::new(s.w as u32, s.h as u32);
    for (i, px) in img.pixels_mut().enumerate() {
        for c in 0..s.c.min(3) {
            px.0[c] = (t.plane(0, c)[i].clamp(0.0, 1.0) * 255.0).round() as u8;
        }
    }
    img.save(path).map_err(|e| DataError::Raster {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Write a probability map as an 8-bit grayscale PNG: round(255 * p).
pub fn save_map_png(path: &Path, map: &EdgeProbMap) -> Result<()> {
    let (h, w) = (map.height(), map.width());
    let mut img: ImageBuffer<Luma<u8>, Vec<u8>> = ImageBuffer::new(w as u32, h as u32);
    for (i, px) in img.pixels_mut().enumerate() {
        px.0[0] = (map.data()[i].clamp(0.0, 1.0) * 255.0).round() as u8;
    }
    img.save(path).map_err(|e| DataError::Raster {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Lossless float dump of a map.
pub fn save_map_f32(path: &Path, map: &EdgeProbMap) -> Result<()> {
    let mut bytes = Vec::with_capacity(24 + 4 * map.data().len());
    bytes.extend_from_slice(MAP_MAGIC);
    bytes.extend_from_slice(&(map.height() as u64).to_le_bytes());
    bytes.extend_from_slice(&(map.width() as u64).to_le_bytes());
    for &v in map.data() {
        bytes.extend_from_slice(&v.to_bits().to_le_bytes());
    }
    std::fs::write(path, bytes).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_map_f32(path: &Path) -> Result<EdgeProbMap> {
    let bytes = std::fs::read(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let fail = |reason: &str| DataError::Raster {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    if bytes.len() < 24 || &bytes[..8] != MAP_MAGIC {
        return Err(fail("not a float map dump (bad magic or truncated header)"));
    }
    let h = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let w = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    let expected = 24 + 4 * h * w;
    if bytes.len() != expected {
        return Err(fail(&format!(
            "expected {expected} bytes for {h}x{w}, found {}",
            bytes.len()
        )));
    }
    let data = bytes[24..]
        .chunks_exact(4)
        .map(|c| f32::from_bits(u32::from_le_bytes(c.try_into().unwrap())))
        .collect();
    Ok(EdgeProbMap::from_vec(h, w, data)?)
}
