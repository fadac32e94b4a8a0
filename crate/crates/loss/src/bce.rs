//! Class-balanced cross-entropy.
//!
//! With N+ positives and N- negatives in a target map,
//!   alpha = lambda * N+ / (N+ + N-)   weights the negative sum,
//!   beta  =          N- / (N+ + N-)   weights the positive sum,
//!   L = -alpha * sum_{j in Y-} ln(1 - p_j) - beta * sum_{j in Y+} ln(p_j).
//!
//! Excluded pixels carry zero weight on both sides. Counts come from the
//! target map's own masks, per image.

use bdcn_tensor::{Graph, NodeId, Shape4, Tensor4};

use crate::error::{LossError, Result};
use crate::targets::TargetMap;

/// Balancing weights (alpha, beta); (0, 0) when the map has no counted pixel.
pub fn alpha_beta(positives: usize, negatives: usize, lambda: f32) -> (f32, f32) {
    let total = positives + negatives;
    if total == 0 {
        return (0.0, 0.0);
    }
    let alpha = lambda * positives as f32 / total as f32;
    let beta = negatives as f32 / total as f32;
    (alpha, beta)
}

/// Append the balanced BCE of `pred` (a probability-map node) against
/// `target` to the graph and return the scalar loss node.
pub fn balanced_bce(graph: &mut Graph, pred: NodeId, target: &TargetMap, lambda: f32) -> Result<NodeId> {
    if lambda <= 0.0 {
        return Err(LossError::Invalid(format!("lambda {lambda} must be > 0")));
    }
    let (h, w) = target.dims();
    let pshape = graph.shape(pred);
    if pshape.h != h || pshape.w != w || pshape.c != 1 || pshape.n != 1 {
        return Err(LossError::Shape(format!(
            "prediction {pshape} does not match target 1x1x{h}x{w}"
        )));
    }
    let (alpha, beta) = alpha_beta(target.positive_count(), target.negative_count(), lambda);
    let shape = Shape4::new(1, 1, h, w)?;
    let neg_w: Vec<f32> = target.neg_mask().iter().map(|&n| if n { alpha } else { 0.0 }).collect();
    let pos_w: Vec<f32> = target.pos_mask().iter().map(|&p| if p { beta } else { 0.0 }).collect();
    let neg_w = Tensor4::from_vec(shape, neg_w)?;
    let pos_w = Tensor4::from_vec(shape, pos_w)?;
    Ok(graph.bce_weighted(pred, neg_w, pos_w)?)
}
