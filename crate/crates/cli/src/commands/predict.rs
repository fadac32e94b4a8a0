//! Prediction: load a checkpoint, run images through the network and write
//! probability maps as 8-bit PNGs (round(255 * p)) plus lossless float
//! dumps. With --emit-side-maps all 2S per-block maps are written next to
//! the fused one; multi-scale fusion applies to the fused map.

use std::path::{Path, PathBuf};

use bdcn_data::raster::{load_image_rgb, save_map_f32, save_map_png};
use bdcn_data::Manifest;
use bdcn_net::{predict_multiscale, Network};

use crate::error::{CliError, Result};

/// Image sources: a manifest file or a directory of rasters.
pub fn collect_images(images: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut list = Vec::new();
    if images.is_dir() {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(images)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                matches!(
                    p.extension().and_then(|e| e.to_str()),
                    Some("png") | Some("pgm") | Some("ppm") | Some("pnm")
                )
            })
            .collect();
        paths.sort();
        for p in paths {
            let id = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            list.push((id, p));
        }
    } else {
        let manifest = Manifest::load(images)?;
        for e in manifest.entries {
            list.push((e.id, e.image));
        }
    }
    if list.is_empty() {
        return Err(CliError::Usage(format!(
            "no images found at {}",
            images.display()
        )));
    }
    Ok(list)
}

pub fn cmd_predict(
    checkpoint: &Path,
    images: &Path,
    out_dir: &Path,
    scales: Option<&[f64]>,
    emit_side_maps: bool,
) -> Result<usize> {
    let net = Network::load(checkpoint)?;
    let sources = collect_images(images)?;
    std::fs::create_dir_all(out_dir)?;

    let mut written = 0usize;
    for (id, path) in &sources {
        let image = load_image_rgb(path)?;
        let outputs = net.predict(&image)?;
        let fused = match scales {
            Some(s) if !(s.len() == 1 && s[0] == 1.0) => predict_multiscale(&net, &image, s)?,
            _ => outputs.fused.clone(),
        };
        save_map_png(&out_dir.join(format!("{id}.png")), &fused)?;
        save_map_f32(&out_dir.join(format!("{id}.f32")), &fused)?;
        written += 1;
        if emit_side_maps {
            for (b, m) in outputs.side_s2d.iter().enumerate() {
                save_map_png(&out_dir.join(format!("{id}.s2d{}.png", b + 1)), m)?;
                save_map_f32(&out_dir.join(format!("{id}.s2d{}.f32", b + 1)), m)?;
            }
            for (b, m) in outputs.side_d2s.iter().enumerate() {
                save_map_png(&out_dir.join(format!("{id}.d2s{}.png", b + 1)), m)?;
                save_map_f32(&out_dir.join(format!("{id}.d2s{}.f32", b + 1)), m)?;
            }
        }
    }
    Ok(written)
}
