//! Evaluation: pair predictions with ground truth by id, NMS-thin the
//! probability maps, sweep the 99-threshold grid, and report ODS/OIS/AP
//! plus the PR curve as CSV.

use std::path::{Path, PathBuf};

use bdcn_data::raster::{load_map, load_map_f32};
use bdcn_data::{consensus_of, Manifest};
use bdcn_eval::{
    default_thresholds, nms_thin, summarize, sweep_thresholds, write_per_image_csv, write_pr_csv,
    write_summary, BinaryMap, EvalSummary,
};
use bdcn_tensor::EdgeProbMap;

use crate::error::{CliError, Result};

/// Locate `<pred_dir>/<id>.f32` (preferred, lossless) or `<id>.png`.
fn prediction_path(pred_dir: &Path, id: &str) -> Option<PathBuf> {
    let f32_path = pred_dir.join(format!("{id}.f32"));
    if f32_path.exists() {
        return Some(f32_path);
    }
    let png_path = pred_dir.join(format!("{id}.png"));
    png_path.exists().then_some(png_path)
}

fn load_prediction(path: &Path) -> Result<EdgeProbMap> {
    if path.extension().and_then(|e| e.to_str()) == Some("f32") {
        Ok(load_map_f32(path)?)
    } else {
        Ok(load_map(path)?)
    }
}

pub struct EvalInputs {
    pub ids: Vec<String>,
    pub predictions: Vec<EdgeProbMap>,
    pub gts: Vec<BinaryMap>,
}

pub fn gather_inputs(pred_dir: &Path, gt_manifest: &Path) -> Result<EvalInputs> {
    let manifest = Manifest::load(gt_manifest)?;
    if manifest.is_empty() {
        return Err(CliError::Usage(format!(
            "manifest {} lists no samples",
            gt_manifest.display()
        )));
    }
    let mut missing = Vec::new();
    let mut ids = Vec::new();
    let mut predictions = Vec::new();
    let mut gts = Vec::new();
    for entry in &manifest.entries {
        let Some(pred_path) = prediction_path(pred_dir, &entry.id) else {
            missing.push(entry.id.clone());
            continue;
        };
        let maps = entry
            .gts
            .iter()
            .map(|p| load_map(p).map_err(CliError::from))
            .collect::<Result<Vec<_>>>()?;
        let consensus = consensus_of(&maps)?;
        ids.push(entry.id.clone());
        predictions.push(load_prediction(&pred_path)?);
        gts.push(BinaryMap::from_gt(&consensus));
    }
    if !missing.is_empty() {
        return Err(CliError::MissingPredictions { ids: missing });
    }
    Ok(EvalInputs {
        ids,
        predictions,
        gts,
    })
}

/// The full scoring pipeline on in-memory maps: NMS, sweep, summary.
pub fn evaluate_maps(
    predictions: &[EdgeProbMap],
    gts: &[BinaryMap],
    tolerance: f64,
) -> Result<EvalSummary> {
    let thinned: Vec<EdgeProbMap> = predictions.iter().map(nms_thin).collect();
    let sweep = sweep_thresholds(&thinned, gts, &default_thresholds(), tolerance)?;
    Ok(summarize(&sweep))
}

pub fn cmd_eval(
    pred_dir: &Path,
    gt_manifest: &Path,
    tolerance: f64,
    out_dir: &Path,
    per_image: bool,
) -> Result<EvalSummary> {
    let inputs = gather_inputs(pred_dir, gt_manifest)?;
    let summary = evaluate_maps(&inputs.predictions, &inputs.gts, tolerance)?;

    std::fs::create_dir_all(out_dir)?;
    write_pr_csv(&out_dir.join("pr.csv"), &summary.pr)?;
    write_summary(&out_dir.join("summary.txt"), &summary)?;
    if per_image {
        write_per_image_csv(&out_dir.join("per_image.csv"), &inputs.ids, &summary)?;
    }
    Ok(summary)
}
