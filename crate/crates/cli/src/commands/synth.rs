//! Synthetic dataset generation: writes images, ground-truth rasters, the
//! per-size-regime GT splits and tab-separated manifests.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use bdcn_data::raster::{save_image_rgb, save_map_png};
use bdcn_data::synth_shapes;
use bdcn_tensor::EdgeProbMap;

use crate::error::Result;

pub fn cmd_synth(out_dir: &Path, count: usize, size: usize, seed: u64) -> Result<usize> {
    let samples = synth_shapes(seed, count, size)?;
    for sub in ["images", "gt", "gt_small", "gt_large"] {
        std::fs::create_dir_all(out_dir.join(sub))?;
    }

    let mut manifest = BufWriter::new(File::create(out_dir.join("manifest.tsv"))?);
    let mut manifest_small = BufWriter::new(File::create(out_dir.join("manifest_small.tsv"))?);
    let mut manifest_large = BufWriter::new(File::create(out_dir.join("manifest_large.tsv"))?);

    for s in &samples {
        let id = &s.sample.id;
        save_image_rgb(&out_dir.join(format!("images/{id}.png")), &s.sample.image)?;

        let gt_map = EdgeProbMap::from_vec(
            s.sample.gt.height(),
            s.sample.gt.width(),
            s.sample.gt.values().to_vec(),
        )
        .map_err(bdcn_data::DataError::from)?;
        save_map_png(&out_dir.join(format!("gt/{id}.png")), &gt_map)?;
        save_map_png(&out_dir.join(format!("gt_small/{id}.png")), &s.gt_small)?;
        save_map_png(&out_dir.join(format!("gt_large/{id}.png")), &s.gt_large)?;

        writeln!(manifest, "images/{id}.png\tgt/{id}.png")?;
        writeln!(manifest_small, "images/{id}.png\tgt_small/{id}.png")?;
        writeln!(manifest_large, "images/{id}.png\tgt_large/{id}.png")?;
    }
    manifest.flush()?;
    manifest_small.flush()?;
    manifest_large.flush()?;
    Ok(samples.len())
}
