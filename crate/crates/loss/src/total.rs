//! The full training objective and the rejected naive baseline.
//!
//! total = w_side * sum_s [ L(P_s_d2s, Y_s_d2s) + L(P_s_s2d, Y_s_s2d) ]
//!       + w_fuse * L(P, Y)
//!
//! where every L is the balanced BCE. The naive baseline supervises the sum
//! of all predictions with one loss; its gradient w.r.t. every prediction is
//! identical (d(sum)/d(P_i) = 1), which is exactly why the cascade exists.

use bdcn_tensor::{Graph, NodeId};

use crate::bce::balanced_bce;
use crate::error::{LossError, Result};
use crate::gt::ConsensusGT;
use crate::targets::CascadeTargets;

/// Scalar loss node plus per-term values for logging and diagnostics.
pub struct TotalLoss {
    pub node: NodeId,
    pub total: f64,
    pub side: f64,
    pub fuse: f64,
    /// (label, value) per balanced-BCE term, e.g. ("side.b1.s2d", 0.43).
    pub terms: Vec<(String, f64)>,
}

impl TotalLoss {
    /// Label of the first non-finite term, if any.
    pub fn non_finite_term(&self) -> Option<&str> {
        self.terms
            .iter()
            .find(|(_, v)| !v.is_finite())
            .map(|(l, _)| l.as_str())
    }
}

pub fn total_loss(
    graph: &mut Graph,
    side_s2d: &[NodeId],
    side_d2s: &[NodeId],
    fused: NodeId,
    targets: &CascadeTargets,
    gt: &ConsensusGT,
    w_side: f32,
    w_fuse: f32,
    lambda: f32,
) -> Result<TotalLoss> {
    let s = side_s2d.len();
    if side_d2s.len() != s || targets.s2d.len() != s || targets.d2s.len() != s {
        return Err(LossError::Shape(format!(
            "inconsistent block counts: {} s2d / {} d2s / {} targets",
            s,
            side_d2s.len(),
            targets.s2d.len()
        )));
    }
    if w_side < 0.0 || w_fuse < 0.0 {
        return Err(LossError::Invalid("loss weights must be >= 0".into()));
    }

    let mut terms = Vec::with_capacity(2 * s + 1);
    let mut side_sum: Option<NodeId> = None;
    let mut side_value = 0.0f64;
    for b in 0..s {
        for (dir, pred, target) in [
            ("d2s", side_d2s[b], &targets.d2s[b]),
            ("s2d", side_s2d[b], &targets.s2d[b]),
        ] {
            let term = balanced_bce(graph, pred, target, lambda)?;
            let v = graph.value(term).scalar_value() as f64;
            terms.push((format!("side.b{}.{}", b + 1, dir), v));
            side_value += v;
            side_sum = Some(match side_sum {
                None => term,
                Some(acc) => graph.add(acc, term)?,
            });
        }
    }
    let fuse_term = balanced_bce(graph, fused, &gt.target_map(), lambda)?;
    let fuse_value = graph.value(fuse_term).scalar_value() as f64;
    terms.push(("fuse".into(), fuse_value));

    let side_scaled = graph.scale(side_sum.expect("s >= 1"), w_side);
    let fuse_scaled = graph.scale(fuse_term, w_fuse);
    let node = graph.add(side_scaled, fuse_scaled)?;
    let total = graph.value(node).scalar_value() as f64;

    Ok(TotalLoss {
        node,
        total,
        side: side_value,
        fuse: fuse_value,
        terms,
    })
}

/// The rejected formulation: one loss on the plain sum of all predictions.
/// Exists to demonstrate its gradient degeneracy; never used in training.
pub fn naive_summed_loss(
    graph: &mut Graph,
    predictions: &[NodeId],
    gt: &ConsensusGT,
    lambda: f32,
) -> Result<NodeId> {
    if predictions.is_empty() {
        return Err(LossError::Shape("need at least one prediction".into()));
    }
    let mut sum = predictions[0];
    for &p in &predictions[1..] {
        sum = graph.add(sum, p)?;
    }
    // The summed map can exceed 1; the BCE clamp handles it uniformly, which
    // keeps the gradients w.r.t. every P_i identical.
    balanced_bce(graph, sum, &gt.target_map(), lambda)
}
