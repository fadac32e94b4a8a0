//! Threshold sweep: binarize each (NMS-thinned) probability map at every
//! threshold and collect match counts. Images are processed in parallel;
//! results land in per-image slots, so aggregation order never matters.

use bdcn_tensor::EdgeProbMap;
use rayon::prelude::*;

use crate::matching::{match_edges, BinaryMap, MatchCounts, MatchError, Result};

/// The standard 99-step grid {0.01, 0.02, ..., 0.99}.
pub fn default_thresholds() -> Vec<f32> {
    (1..=99).map(|i| i as f32 / 100.0).collect()
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub thresholds: Vec<f32>,
    /// counts[image][threshold]
    pub per_image: Vec<Vec<MatchCounts>>,
}

pub fn sweep_thresholds(
    prob_maps: &[EdgeProbMap],
    gts: &[BinaryMap],
    thresholds: &[f32],
    tolerance: f64,
) -> Result<SweepResult> {
    if prob_maps.is_empty() {
        return Err(MatchError::EmptyDataset);
    }
    if prob_maps.len() != gts.len() {
        return Err(MatchError::Dims(format!(
            "{} prediction maps vs {} ground truths",
            prob_maps.len(),
            gts.len()
        )));
    }
    if thresholds.is_empty()
        || thresholds.iter().any(|&t| t <= 0.0 || t >= 1.0)
        || thresholds.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(MatchError::BadThresholds);
    }

    let per_image: Vec<Vec<MatchCounts>> = prob_maps
        .par_iter()
        .zip(gts.par_iter())
        .map(|(map, gt)| {
            thresholds
                .iter()
                .map(|&t| match_edges(&BinaryMap::from_prob(map, t), gt, tolerance))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepResult {
        thresholds: thresholds.to_vec(),
        per_image,
    })
}
