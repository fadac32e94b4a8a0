//! SGD with momentum and coupled L2 weight decay:
//!
//! `v <- momentum * v + grad + weight_decay * param`
//! `param <- param - lr * v`
//!
//! Weight decay enters the velocity update (classic formulation), so tests
//! can unroll the recurrence by hand.

use crate::error::{Result, TensorError};
use crate::tensor::Tensor4;

#[derive(Debug, Clone)]
pub struct OptimState {
    pub learning_rate: f32,
    pub momentum: f32,
    pub weight_decay: f32,
    velocity: Vec<Vec<f32>>,
}

impl OptimState {
    pub fn new(learning_rate: f32, momentum: f32, weight_decay: f32) -> Self {
        Self {
            learning_rate,
            momentum,
            weight_decay,
            velocity: Vec::new(),
        }
    }

    pub fn velocity(&self, i: usize) -> Option<&[f32]> {
        self.velocity.get(i).map(|v| v.as_slice())
    }
}

/// One optimizer step over a named parameter list. Gradients must be finite;
/// a non-finite gradient aborts before any parameter is touched.
pub fn sgd_step(
    params: &mut [(String, Tensor4)],
    grads: &[Vec<f32>],
    state: &mut OptimState,
) -> Result<()> {
    if grads.len() != params.len() {
        return Err(TensorError::OptimStateMismatch {
            state: grads.len(),
            params: params.len(),
        });
    }
    if state.velocity.is_empty() {
        state.velocity = params.iter().map(|(_, p)| vec![0.0; p.numel()]).collect();
    }
    if state.velocity.len() != params.len() {
        return Err(TensorError::OptimStateMismatch {
            state: state.velocity.len(),
            params: params.len(),
        });
    }
    for ((name, p), g) in params.iter().zip(grads) {
        if g.len() != p.numel() {
            return Err(TensorError::ShapeMismatch {
                context: "sgd_step gradient",
                expected: p.numel().to_string(),
                got: g.len().to_string(),
            });
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(TensorError::NonFiniteGradient { name: name.clone() });
        }
    }

    let (lr, mu, wd) = (state.learning_rate, state.momentum, state.weight_decay);
    for (((_, p), g), v) in params.iter_mut().zip(grads).zip(&mut state.velocity) {
        for ((pv, &gv), vv) in p.data_mut().iter_mut().zip(g).zip(v.iter_mut()) {
            *vv = mu * *vv + gv + wd * *pv;
            *pv -= lr * *vv;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::Shape4;

    fn param(v: f32) -> (String, Tensor4) {
        ("p".into(), Tensor4::filled(Shape4::new(1, 1, 1, 1).unwrap(), v))
    }

    #[test]
    fn plain_sgd_moves_by_lr_times_grad() {
        let mut params = vec![param(1.0)];
        let mut state = OptimState::new(0.1, 0.0, 0.0);
        sgd_step(&mut params, &[vec![0.5]], &mut state).unwrap();
        assert!((params[0].1.data()[0] - 0.95).abs() < 1e-7);
    }

    #[test]
    fn momentum_moves_with_zero_grad() {
        let mut params = vec![param(1.0)];
        let mut state = OptimState::new(0.1, 0.9, 0.0);
        // First step builds velocity from the gradient.
        sgd_step(&mut params, &[vec![1.0]], &mut state).unwrap();
        let after_first = params[0].1.data()[0];
        // Second step with zero gradient still moves by -lr * momentum * v.
        sgd_step(&mut params, &[vec![0.0]], &mut state).unwrap();
        let expect = after_first - 0.1 * 0.9 * 1.0;
        assert!((params[0].1.data()[0] - expect).abs() < 1e-7);
    }

    #[test]
    fn two_steps_unroll() {
        // v1 = g, p1 = p0 - lr*g; v2 = 0.9g + g, p2 = p1 - lr*1.9g
        // total displacement = -lr * (g + 1.9 g)
        let g = 0.4f32;
        let mut params = vec![param(2.0)];
        let mut state = OptimState::new(0.05, 0.9, 0.0);
        sgd_step(&mut params, &[vec![g]], &mut state).unwrap();
        sgd_step(&mut params, &[vec![g]], &mut state).unwrap();
        let expect = 2.0 - 0.05 * (g + 1.9 * g);
        assert!((params[0].1.data()[0] - expect).abs() < 1e-6);
    }

    #[test]
    fn weight_decay_enters_velocity() {
        let mut params = vec![param(2.0)];
        let mut state = OptimState::new(0.1, 0.0, 0.5);
        sgd_step(&mut params, &[vec![0.0]], &mut state).unwrap();
        // v = 0.5 * 2.0 = 1.0 -> p = 2.0 - 0.1
        assert!((params[0].1.data()[0] - 1.9).abs() < 1e-7);
    }

    #[test]
    fn non_finite_gradient_is_an_error() {
        let mut params = vec![param(1.0)];
        let mut state = OptimState::new(0.1, 0.0, 0.0);
        let err = sgd_step(&mut params, &[vec![f32::NAN]], &mut state);
        assert!(matches!(err, Err(TensorError::NonFiniteGradient { .. })));
        // Parameter untouched.
        assert_eq!(params[0].1.data()[0], 1.0);
    }
}
