//! Tolerance-radius correspondence matching between binary edge maps.
//!
//! Candidate pairs within `tolerance * sqrt(h^2 + w^2)` pixels are consumed
//! greedily by ascending squared distance (an exact integer, so there are no
//! float ties). Equal distances are ordered by the unordered pair of linear
//! pixel indices, which makes the pair sequence — and therefore the match
//! count — symmetric under swapping prediction and ground truth.

use bdcn_tensor::EdgeProbMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatchError {
    #[error("dimension mismatch: {0}")]
    Dims(String),

    #[error("tolerance must be > 0, got {0}")]
    Tolerance(f64),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("thresholds must be strictly inside (0, 1) and ascending")]
    BadThresholds,
}

pub type Result<T> = std::result::Result<T, MatchError>;

/// Binary edge mask.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMap {
    h: usize,
    w: usize,
    data: Vec<bool>,
}

impl BinaryMap {
    pub fn new(h: usize, w: usize, data: Vec<bool>) -> Self {
        assert_eq!(data.len(), h * w);
        Self { h, w, data }
    }

    /// Threshold a probability map at `prob >= t`.
    pub fn from_prob(map: &EdgeProbMap, t: f32) -> Self {
        Self {
            h: map.height(),
            w: map.width(),
            data: map.data().iter().map(|&v| v >= t).collect(),
        }
    }

    /// Every annotated pixel (value > 0) counts as an edge.
    pub fn from_gt(map: &EdgeProbMap) -> Self {
        Self {
            h: map.height(),
            w: map.width(),
            data: map.data().iter().map(|&v| v > 0.0).collect(),
        }
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn pixels(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for y in 0..self.h {
            for x in 0..self.w {
                if self.data[y * self.w + x] {
                    out.push((y, x));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatchCounts {
    pub tp: u64,
    pub fp: u64,
    pub false_neg: u64,
}

impl MatchCounts {
    pub fn add(&mut self, other: &MatchCounts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.false_neg += other.false_neg;
    }
}

pub fn match_radius(h: usize, w: usize, tolerance: f64) -> f64 {
    tolerance * ((h * h + w * w) as f64).sqrt()
}

pub fn match_edges(pred: &BinaryMap, gt: &BinaryMap, tolerance: f64) -> Result<MatchCounts> {
    if pred.h != gt.h || pred.w != gt.w {
        return Err(MatchError::Dims(format!(
            "pred {}x{} vs gt {}x{}",
            pred.h, pred.w, gt.h, gt.w
        )));
    }
    if tolerance <= 0.0 {
        return Err(MatchError::Tolerance(tolerance));
    }
    let radius = match_radius(pred.h, pred.w, tolerance);
    let pred_px = pred.pixels();
    let gt_px = gt.pixels();
    let tp = greedy_tp(&pred_px, &gt_px, pred.w, radius);
    Ok(MatchCounts {
        tp: tp as u64,
        fp: (pred_px.len() - tp) as u64,
        false_neg: (gt_px.len() - tp) as u64,
    })
}

/// Greedy one-to-one matching; returns the number of matched pairs.
pub fn greedy_tp(pred: &[(usize, usize)], gt: &[(usize, usize)], w: usize, radius: f64) -> usize {
    if pred.is_empty() || gt.is_empty() {
        return 0;
    }
    let r2 = radius * radius;

    // Bucket ground-truth pixels into radius-sized grid cells; any admissible
    // pair then lies in the same or an adjacent cell.
    let cell = (radius.ceil() as usize).max(1);
    let grid_w = w / cell + 1;
    let mut buckets: Vec<Vec<usize>> = Vec::new();
    let mut grid_h = 0usize;
    for (j, &(gy, gx)) in gt.iter().enumerate() {
        let (cy, cx) = (gy / cell, gx / cell);
        grid_h = grid_h.max(cy + 1);
        let idx = cy * grid_w + cx;
        if buckets.len() <= idx {
            buckets.resize(idx + 1, Vec::new());
        }
        buckets[idx].push(j);
    }

    // (d^2, min linear index, max linear index, pred idx, gt idx)
    let mut pairs: Vec<(u64, u64, u64, u32, u32)> = Vec::new();
    for (i, &(py, px)) in pred.iter().enumerate() {
        let cy = (py / cell) as isize;
        let cx = (px / cell) as isize;
        for by in (cy - 1)..=(cy + 1) {
            if by < 0 || by as usize >= grid_h {
                continue;
            }
            for bx in (cx - 1)..=(cx + 1) {
                if bx < 0 || bx as usize >= grid_w {
                    continue;
                }
                let idx = by as usize * grid_w + bx as usize;
                let Some(bucket) = buckets.get(idx) else { continue };
                for &j in bucket {
                    let (gy, gx) = gt[j];
                    let dy = py as i64 - gy as i64;
                    let dx = px as i64 - gx as i64;
                    let d2 = (dy * dy + dx * dx) as u64;
                    if d2 as f64 <= r2 {
                        let pk = (py * w + px) as u64;
                        let gk = (gy * w + gx) as u64;
                        pairs.push((d2, pk.min(gk), pk.max(gk), i as u32, j as u32));
                    }
                }
            }
        }
    }
    pairs.sort_unstable();

    let mut pred_used = vec![false; pred.len()];
    let mut gt_used = vec![false; gt.len()];
    let mut tp = 0usize;
    for &(_, _, _, i, j) in &pairs {
        if !pred_used[i as usize] && !gt_used[j as usize] {
            pred_used[i as usize] = true;
            gt_used[j as usize] = true;
            tp += 1;
        }
    }
    tp
}

/// Exhaustive maximum-cardinality one-to-one matching (augmenting paths);
/// the reference the greedy matcher is verified against on small fixtures.
pub mod reference {
    pub fn max_matching_tp(pred: &[(usize, usize)], gt: &[(usize, usize)], radius: f64) -> usize {
        let r2 = radius * radius;
        let adj: Vec<Vec<usize>> = pred
            .iter()
            .map(|&(py, px)| {
                gt.iter()
                    .enumerate()
                    .filter(|(_, &(gy, gx))| {
                        let dy = py as f64 - gy as f64;
                        let dx = px as f64 - gx as f64;
                        dy * dy + dx * dx <= r2
                    })
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();

        let mut gt_owner: Vec<Option<usize>> = vec![None; gt.len()];
        let mut matched = 0usize;
        for i in 0..pred.len() {
            let mut visited = vec![false; gt.len()];
            if augment(i, &adj, &mut gt_owner, &mut visited) {
                matched += 1;
            }
        }
        matched
    }

    fn augment(i: usize, adj: &[Vec<usize>], gt_owner: &mut [Option<usize>], visited: &mut [bool]) -> bool {
        for &j in &adj[i] {
            if visited[j] {
                continue;
            }
            visited[j] = true;
            if gt_owner[j].is_none() || augment(gt_owner[j].unwrap(), adj, gt_owner, visited) {
                gt_owner[j] = Some(i);
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask_from(pixels: &[(usize, usize)], h: usize, w: usize) -> BinaryMap {
        let mut data = vec![false; h * w];
        for &(y, x) in pixels {
            data[y * w + x] = true;
        }
        BinaryMap::new(h, w, data)
    }

    #[test]
    fn identical_maps_match_perfectly() {
        let px = [(3, 3), (10, 20), (50, 50), (99, 0)];
        let a = mask_from(&px, 100, 100);
        let c = match_edges(&a, &a, 0.0075).unwrap();
        assert_eq!(c.tp, 4);
        assert_eq!(c.fp, 0);
        assert_eq!(c.false_neg, 0);
    }

    #[test]
    fn empty_prediction_counts_all_misses() {
        let gt = mask_from(&[(1, 1), (5, 5)], 10, 10);
        let pred = mask_from(&[], 10, 10);
        let c = match_edges(&pred, &gt, 0.0075).unwrap();
        assert_eq!((c.tp, c.fp, c.false_neg), (0, 0, 2));
    }

    #[test]
    fn one_pixel_shift_within_radius_matches() {
        // 100x100 diagonal is ~141.4 px, so tolerance 0.0075 gives ~1.06 px.
        let gt_px: Vec<(usize, usize)> = (10..90).map(|y| (y, 50)).collect();
        let pred_px: Vec<(usize, usize)> = gt_px.iter().map(|&(y, x)| (y, x + 1)).collect();
        let gt = mask_from(&gt_px, 100, 100);
        let pred = mask_from(&pred_px, 100, 100);
        let c = match_edges(&pred, &gt, 0.0075).unwrap();
        assert_eq!((c.fp, c.false_neg), (0, 0));
        assert_eq!(c.tp, gt_px.len() as u64);
    }

    #[test]
    fn swapping_pred_and_gt_swaps_fp_fn() {
        let a = mask_from(&[(2, 2), (4, 7), (8, 8), (9, 1)], 12, 12);
        let b = mask_from(&[(2, 3), (5, 7), (1, 1)], 12, 12);
        let ab = match_edges(&a, &b, 0.1).unwrap();
        let ba = match_edges(&b, &a, 0.1).unwrap();
        assert_eq!(ab.tp, ba.tp);
        assert_eq!(ab.fp, ba.false_neg);
        assert_eq!(ab.false_neg, ba.fp);
    }

    #[test]
    fn count_identities_hold() {
        let a = mask_from(&[(0, 0), (3, 3), (6, 6), (9, 9)], 10, 10);
        let b = mask_from(&[(0, 1), (3, 3), (9, 8)], 10, 10);
        let c = match_edges(&a, &b, 0.05).unwrap();
        assert_eq!(c.tp + c.fp, 4);
        assert_eq!(c.tp + c.false_neg, 3);
        assert!(c.tp <= 3);
    }

    #[test]
    fn dims_mismatch_rejected() {
        let a = mask_from(&[], 4, 4);
        let b = mask_from(&[], 4, 5);
        assert!(match_edges(&a, &b, 0.01).is_err());
    }
}
