//! Weighted binary cross-entropy over a probability map.
//!
//! `loss = sum_j  -neg_w[j] * ln(1 - p[j])  -  pos_w[j] * ln(p[j])`
//!
//! Callers encode class balancing and pixel exclusion in the two weight maps
//! (excluded pixels carry zero weight in both). Probabilities are clamped to
//! [EPS, 1-EPS] before the logarithm, and the gradient uses the clamped value.

use crate::tensor::Tensor4;

pub const BCE_EPS: f32 = 1e-7;

#[inline]
fn clamp_prob(p: f32) -> f64 {
    (p as f64).clamp(BCE_EPS as f64, 1.0 - BCE_EPS as f64)
}

pub fn bce_forward(pred: &Tensor4, neg_w: &Tensor4, pos_w: &Tensor4) -> f64 {
    let mut acc = 0.0f64;
    for ((&p, &nw), &pw) in pred.data().iter().zip(neg_w.data()).zip(pos_w.data()) {
        if nw == 0.0 && pw == 0.0 {
            continue;
        }
        let p = clamp_prob(p);
        if nw != 0.0 {
            acc -= nw as f64 * (1.0 - p).ln();
        }
        if pw != 0.0 {
            acc -= pw as f64 * p.ln();
        }
    }
    acc
}

pub fn bce_backward(pred: &Tensor4, neg_w: &Tensor4, pos_w: &Tensor4, upstream: f32) -> Vec<f32> {
    let mut dx = vec![0.0f32; pred.numel()];
    let g = upstream as f64;
    for (i, ((&p, &nw), &pw)) in pred.data().iter().zip(neg_w.data()).zip(pos_w.data()).enumerate() {
        if nw == 0.0 && pw == 0.0 {
            continue;
        }
        let p = clamp_prob(p);
        dx[i] = (g * (nw as f64 / (1.0 - p) - pw as f64 / p)) as f32;
    }
    dx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::Shape4;

    #[test]
    fn zero_weights_give_zero_loss() {
        let shape = Shape4::new(1, 1, 2, 2).unwrap();
        let pred = Tensor4::filled(shape, 0.3);
        let zero = Tensor4::zeros(shape);
        assert_eq!(bce_forward(&pred, &zero, &zero), 0.0);
        assert!(bce_backward(&pred, &zero, &zero, 1.0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hand_computed_value() {
        let shape = Shape4::new(1, 1, 1, 2).unwrap();
        let pred = Tensor4::from_vec(shape, vec![0.8, 0.25]).unwrap();
        let neg = Tensor4::from_vec(shape, vec![0.0, 0.5]).unwrap();
        let pos = Tensor4::from_vec(shape, vec![2.0, 0.0]).unwrap();
        let expect = -2.0 * (0.8f32 as f64).ln() - 0.5 * ((1.0f32 - 0.25f32) as f64).ln();
        assert!((bce_forward(&pred, &neg, &pos) - expect).abs() < 1e-9);
    }

    #[test]
    fn extreme_probabilities_are_clamped() {
        let shape = Shape4::new(1, 1, 1, 2).unwrap();
        let pred = Tensor4::from_vec(shape, vec![0.0, 1.0]).unwrap();
        let neg = Tensor4::from_vec(shape, vec![1.0, 1.0]).unwrap();
        let pos = Tensor4::from_vec(shape, vec![1.0, 1.0]).unwrap();
        let loss = bce_forward(&pred, &neg, &pos);
        assert!(loss.is_finite());
        assert!(bce_backward(&pred, &neg, &pos, 1.0).iter().all(|v| v.is_finite()));
    }
}
