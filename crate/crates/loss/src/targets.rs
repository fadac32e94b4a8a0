//! Layer-specific supervision targets.
//!
//! For block s (1-based), the two residual targets are
//!
//!   Y_s_s2d = clamp(Y - sum_{i<s} P_i_s2d, 0, 1)
//!   Y_s_d2s = clamp(Y - sum_{i>s} P_i_d2s, 0, 1)
//!
//! so block 1's s2d target and block S's d2s target equal Y exactly. The
//! propagated predictions are detached: targets are built from plain value
//! maps, and no gradient flows through the cascade path. For balancing, a
//! residual target pixel counts as positive when its value exceeds gamma and
//! as negative when the raw annotation is exactly zero; everything else is
//! excluded — the same gamma-band rule the raw annotation uses.

use bdcn_tensor::EdgeProbMap;

use crate::error::{LossError, Result};
use crate::gt::ConsensusGT;

/// One supervision map plus its balancing masks.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetMap {
    pub(crate) h: usize,
    pub(crate) w: usize,
    pub(crate) values: Vec<f32>,
    pub(crate) pos: Vec<bool>,
    pub(crate) neg: Vec<bool>,
}

impl TargetMap {
    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn positive_count(&self) -> usize {
        self.pos.iter().filter(|&&p| p).count()
    }

    pub fn negative_count(&self) -> usize {
        self.neg.iter().filter(|&&n| n).count()
    }

    pub fn pos_mask(&self) -> &[bool] {
        &self.pos
    }

    pub fn neg_mask(&self) -> &[bool] {
        &self.neg
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.h, self.w)
    }
}

#[derive(Debug, Clone)]
pub struct CascadeTargets {
    pub s2d: Vec<TargetMap>,
    pub d2s: Vec<TargetMap>,
}

/// Build the residual targets for every block from detached prediction maps
/// (shallow to deep order in both slices).
pub fn build_cascade_targets(
    gt: &ConsensusGT,
    side_s2d: &[EdgeProbMap],
    side_d2s: &[EdgeProbMap],
) -> Result<CascadeTargets> {
    let s = side_s2d.len();
    if s == 0 || side_d2s.len() != s {
        return Err(LossError::Shape(format!(
            "need equal non-empty prediction lists, got {} s2d / {} d2s",
            s,
            side_d2s.len()
        )));
    }
    let n = gt.values().len();
    for m in side_s2d.iter().chain(side_d2s) {
        if m.height() != gt.height() || m.width() != gt.width() {
            return Err(LossError::Shape(format!(
                "prediction {}x{} does not match ground truth {}x{}",
                m.height(),
                m.width(),
                gt.height(),
                gt.width()
            )));
        }
    }

    let residual_target = |propagated: &[f32]| -> TargetMap {
        let mut values = Vec::with_capacity(n);
        let mut pos = Vec::with_capacity(n);
        let mut neg = Vec::with_capacity(n);
        for i in 0..n {
            let v = (gt.values()[i] - propagated[i]).clamp(0.0, 1.0);
            values.push(v);
            pos.push(v > gt.gamma());
            neg.push(gt.is_negative(i));
        }
        TargetMap {
            h: gt.height(),
            w: gt.width(),
            values,
            pos,
            neg,
        }
    };

    // s2d: running sum of predictions from shallower blocks.
    let mut s2d = Vec::with_capacity(s);
    let mut acc = vec![0.0f32; n];
    for block in 0..s {
        s2d.push(residual_target(&acc));
        for (a, &p) in acc.iter_mut().zip(side_s2d[block].data()) {
            *a += p;
        }
    }

    // d2s: running sum of predictions from deeper blocks.
    let mut d2s_rev = Vec::with_capacity(s);
    let mut acc = vec![0.0f32; n];
    for block in (0..s).rev() {
        d2s_rev.push(residual_target(&acc));
        for (a, &p) in acc.iter_mut().zip(side_d2s[block].data()) {
            *a += p;
        }
    }
    d2s_rev.reverse();

    Ok(CascadeTargets { s2d, d2s: d2s_rev })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(h: usize, w: usize, v: &[f32]) -> EdgeProbMap {
        EdgeProbMap::from_vec(h, w, v.to_vec()).unwrap()
    }

    #[test]
    fn boundary_blocks_get_raw_annotation() {
        let gt = ConsensusGT::new(1, 3, vec![1.0, 0.0, 0.6], 0.3).unwrap();
        let p = [map(1, 3, &[0.4, 0.5, 0.2]), map(1, 3, &[0.3, 0.1, 0.9])];
        let t = build_cascade_targets(&gt, &p, &p).unwrap();
        assert_eq!(t.s2d[0].values(), gt.values());
        assert_eq!(t.d2s[1].values(), gt.values());
    }

    #[test]
    fn residual_subtracts_propagated_prediction() {
        // y = 1.0 and P_1_s2d = 0.4 at that pixel -> block-2 target 0.6
        let gt = ConsensusGT::new(1, 1, vec![1.0], 0.3).unwrap();
        let p = [map(1, 1, &[0.4]), map(1, 1, &[0.9])];
        let t = build_cascade_targets(&gt, &p, &p).unwrap();
        assert!((t.s2d[1].values()[0] - 0.6).abs() < 1e-6);
        assert!(t.s2d[1].pos_mask()[0]);
    }

    #[test]
    fn negative_residual_clamps_to_zero() {
        // y = 0 and P_1_s2d = 0.5 -> raw residual -0.5, clamped to 0; the
        // pixel stays a negative because the raw annotation is zero.
        let gt = ConsensusGT::new(1, 1, vec![0.0], 0.3).unwrap();
        let p = [map(1, 1, &[0.5]), map(1, 1, &[0.5])];
        let t = build_cascade_targets(&gt, &p, &p).unwrap();
        let raw = 0.0f32 - 0.5;
        assert!(raw < 0.0);
        assert_eq!(t.s2d[1].values()[0], 0.0);
        assert!(t.s2d[1].neg_mask()[0]);
        assert!(!t.s2d[1].pos_mask()[0]);
    }

    #[test]
    fn gamma_band_applies_to_residuals() {
        // y = 0.9, propagated 0.7 -> residual 0.2 <= gamma: excluded from
        // positives, and not negative either since raw y != 0.
        let gt = ConsensusGT::new(1, 1, vec![0.9], 0.3).unwrap();
        let p = [map(1, 1, &[0.7]), map(1, 1, &[0.5])];
        let t = build_cascade_targets(&gt, &p, &p).unwrap();
        assert!(!t.s2d[1].pos_mask()[0]);
        assert!(!t.s2d[1].neg_mask()[0]);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let gt = ConsensusGT::new(1, 2, vec![0.0, 1.0], 0.3).unwrap();
        let p = [map(1, 3, &[0.1, 0.2, 0.3])];
        assert!(build_cascade_targets(&gt, &p, &p).is_err());
    }
}
