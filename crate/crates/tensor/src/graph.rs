//! Recorded computation graph with reverse-mode differentiation.
//!
//! Ops append nodes to a `Graph`; node indices are creation-ordered, so the
//! creation order is already a topological order and the backward pass is a
//! single reverse sweep visiting each node exactly once. A graph is built,
//! differentiated and dropped per forward pass; parameters enter as leaves.

use crate::error::{Result, TensorError};
use crate::ops::bce::{bce_backward, bce_forward};
use crate::ops::conv::{
    conv2d_backward_bias, conv2d_backward_input, conv2d_backward_weight, conv2d_forward,
};
use crate::ops::pool::{maxpool2_backward, maxpool2_forward};
use crate::ops::upsample::{upsample_backward, upsample_forward};
use crate::shape::{ConvSpec, Shape4};
use crate::tensor::Tensor4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(&self) -> usize {
        self.0
    }
}

enum Op {
    Leaf,
    Conv2d {
        input: NodeId,
        weight: NodeId,
        bias: Option<NodeId>,
        spec: ConvSpec,
    },
    MaxPool2 {
        input: NodeId,
        argmax: Vec<u32>,
    },
    UpsampleBilinear {
        input: NodeId,
    },
    Sigmoid {
        input: NodeId,
    },
    Relu {
        input: NodeId,
    },
    Add {
        lhs: NodeId,
        rhs: NodeId,
    },
    Scale {
        input: NodeId,
        factor: f32,
    },
    SumAll {
        input: NodeId,
    },
    ConcatChannels {
        inputs: Vec<NodeId>,
    },
    /// Weighted BCE against constant weight maps (not graph nodes).
    BceWeighted {
        pred: NodeId,
        neg_w: Tensor4,
        pos_w: Tensor4,
    },
}

struct Node {
    value: Tensor4,
    op: Op,
    needs_grad: bool,
}

#[derive(Default)]
pub struct Graph {
    nodes: Vec<Node>,
}

/// Per-node gradient buffers produced by `Graph::backward`.
pub struct Gradients {
    grads: Vec<Option<Vec<f32>>>,
}

impl Gradients {
    pub fn get(&self, id: NodeId) -> Option<&[f32]> {
        self.grads.get(id.0).and_then(|g| g.as_deref())
    }

    /// Gradient of a node, all-zeros if the node never received one.
    pub fn get_or_zeros(&self, id: NodeId, numel: usize) -> Vec<f32> {
        match self.get(id) {
            Some(g) => g.to_vec(),
            None => vec![0.0; numel],
        }
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, id: NodeId) -> &Tensor4 {
        &self.nodes[id.0].value
    }

    pub fn shape(&self, id: NodeId) -> Shape4 {
        self.nodes[id.0].value.shape()
    }

    fn push(&mut self, value: Tensor4, op: Op, needs_grad: bool) -> NodeId {
        self.nodes.push(Node {
            value,
            op,
            needs_grad,
        });
        NodeId(self.nodes.len() - 1)
    }

    fn needs(&self, id: NodeId) -> bool {
        self.nodes[id.0].needs_grad
    }

    /// Insert a tensor as a graph leaf; `requires_grad` carries over.
    pub fn leaf(&mut self, value: Tensor4) -> NodeId {
        let needs = value.requires_grad();
        self.push(value, Op::Leaf, needs)
    }

    pub fn conv2d(
        &mut self,
        input: NodeId,
        weight: NodeId,
        bias: Option<NodeId>,
        spec: ConvSpec,
    ) -> Result<NodeId> {
        let bias_slice = bias.map(|b| self.nodes[b.0].value.data());
        let out = conv2d_forward(&self.nodes[input.0].value, &self.nodes[weight.0].value, bias_slice, spec)?;
        let needs = self.needs(input) || self.needs(weight) || bias.map_or(false, |b| self.needs(b));
        Ok(self.push(
            out,
            Op::Conv2d {
                input,
                weight,
                bias,
                spec,
            },
            needs,
        ))
    }

    pub fn maxpool2(&mut self, input: NodeId) -> NodeId {
        let pooled = maxpool2_forward(&self.nodes[input.0].value);
        let needs = self.needs(input);
        self.push(
            pooled.output,
            Op::MaxPool2 {
                input,
                argmax: pooled.argmax,
            },
            needs,
        )
    }

    pub fn upsample_bilinear(&mut self, input: NodeId, target_h: usize, target_w: usize) -> Result<NodeId> {
        let out = upsample_forward(&self.nodes[input.0].value, target_h, target_w)?;
        let needs = self.needs(input);
        Ok(self.push(out, Op::UpsampleBilinear { input }, needs))
    }

    pub fn sigmoid(&mut self, input: NodeId) -> NodeId {
        let x = &self.nodes[input.0].value;
        let data = x.data().iter().map(|&v| 1.0 / (1.0 + (-v).exp())).collect();
        let out = Tensor4::from_vec(x.shape(), data).expect("same shape");
        let needs = self.needs(input);
        self.push(out, Op::Sigmoid { input }, needs)
    }

    pub fn relu(&mut self, input: NodeId) -> NodeId {
        let x = &self.nodes[input.0].value;
        let data = x.data().iter().map(|&v| v.max(0.0)).collect();
        let out = Tensor4::from_vec(x.shape(), data).expect("same shape");
        let needs = self.needs(input);
        self.push(out, Op::Relu { input }, needs)
    }

    pub fn add(&mut self, lhs: NodeId, rhs: NodeId) -> Result<NodeId> {
        let (a, b) = (&self.nodes[lhs.0].value, &self.nodes[rhs.0].value);
        if a.shape() != b.shape() {
            return Err(TensorError::ShapeMismatch {
                context: "add",
                expected: a.shape().to_string(),
                got: b.shape().to_string(),
            });
        }
        let data = a.data().iter().zip(b.data()).map(|(&x, &y)| x + y).collect();
        let out = Tensor4::from_vec(a.shape(), data).expect("same shape");
        let needs = self.needs(lhs) || self.needs(rhs);
        Ok(self.push(out, Op::Add { lhs, rhs }, needs))
    }

    pub fn scale(&mut self, input: NodeId, factor: f32) -> NodeId {
        let x = &self.nodes[input.0].value;
        let data = x.data().iter().map(|&v| v * factor).collect();
        let out = Tensor4::from_vec(x.shape(), data).expect("same shape");
        let needs = self.needs(input);
        self.push(out, Op::Scale { input, factor }, needs)
    }

    pub fn sum_all(&mut self, input: NodeId) -> NodeId {
        let x = &self.nodes[input.0].value;
        let total: f64 = x.data().iter().map(|&v| v as f64).sum();
        let needs = self.needs(input);
        self.push(Tensor4::scalar(total as f32), Op::SumAll { input }, needs)
    }

    pub fn concat_channels(&mut self, inputs: &[NodeId]) -> Result<NodeId> {
        assert!(!inputs.is_empty(), "concat of zero inputs");
        let first = self.nodes[inputs[0].0].value.shape();
        let mut c_total = 0;
        for &id in inputs {
            let s = self.nodes[id.0].value.shape();
            if s.n != first.n || s.h != first.h || s.w != first.w {
                return Err(TensorError::ShapeMismatch {
                    context: "concat_channels",
                    expected: format!("{}x*x{}x{}", first.n, first.h, first.w),
                    got: s.to_string(),
                });
            }
            c_total += s.c;
        }
        let oshape = Shape4::new(first.n, c_total, first.h, first.w)?;
        let mut out = Tensor4::zeros(oshape);
        let plane = first.h * first.w;
        for n in 0..first.n {
            let mut c_off = 0;
            for &id in inputs {
                let src = &self.nodes[id.0].value;
                for c in 0..src.shape().c {
                    let dst_start = oshape.offset(n, c_off + c, 0, 0);
                    out.data_mut()[dst_start..dst_start + plane].copy_from_slice(src.plane(n, c));
                }
                c_off += src.shape().c;
            }
        }
        let needs = inputs.iter().any(|&id| self.needs(id));
        Ok(self.push(
            out,
            Op::ConcatChannels {
                inputs: inputs.to_vec(),
            },
            needs,
        ))
    }

    /// Weighted BCE loss node (scalar). Weight maps must match `pred` shape.
    pub fn bce_weighted(&mut self, pred: NodeId, neg_w: Tensor4, pos_w: Tensor4) -> Result<NodeId> {
        let pshape = self.nodes[pred.0].value.shape();
        if neg_w.shape() != pshape || pos_w.shape() != pshape {
            return Err(TensorError::ShapeMismatch {
                context: "bce_weighted weight maps",
                expected: pshape.to_string(),
                got: format!("{} / {}", neg_w.shape(), pos_w.shape()),
            });
        }
        let value = bce_forward(&self.nodes[pred.0].value, &neg_w, &pos_w);
        let needs = self.needs(pred);
        Ok(self.push(
            Tensor4::scalar(value as f32),
            Op::BceWeighted { pred, neg_w, pos_w },
            needs,
        ))
    }

    /// Reverse sweep from a scalar loss. Every node is visited at most once,
    /// in reverse creation (= reverse topological) order.
    pub fn backward(&self, loss: NodeId) -> Result<Gradients> {
        let loss_node = &self.nodes[loss.0];
        if !loss_node.value.shape().is_scalar() {
            return Err(TensorError::NonScalarLoss(loss_node.value.shape().to_string()));
        }
        let mut grads: Vec<Option<Vec<f32>>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(vec![1.0]);

        for idx in (0..=loss.0).rev() {
            if grads[idx].is_none() || !self.nodes[idx].needs_grad {
                continue;
            }
            let dy_vec = grads[idx].take().expect("checked above");
            let node = &self.nodes[idx];
            let dy = Tensor4::from_vec(node.value.shape(), dy_vec).expect("grad shape matches value");

            match &node.op {
                Op::Leaf => {
                    // Keep leaf gradients for the caller.
                    grads[idx] = Some(dy.data().to_vec());
                }
                Op::Conv2d {
                    input,
                    weight,
                    bias,
                    spec,
                } => {
                    if self.needs(*input) {
                        let dx = conv2d_backward_input(
                            &dy,
                            &self.nodes[weight.0].value,
                            self.nodes[input.0].value.shape(),
                            *spec,
                        );
                        accumulate(&mut grads, input.0, dx);
                    }
                    if self.needs(*weight) {
                        let dw = conv2d_backward_weight(
                            &dy,
                            &self.nodes[input.0].value,
                            self.nodes[weight.0].value.shape(),
                            *spec,
                        );
                        accumulate(&mut grads, weight.0, dw);
                    }
                    if let Some(b) = bias {
                        if self.needs(*b) {
                            accumulate(&mut grads, b.0, conv2d_backward_bias(&dy));
                        }
                    }
                }
                Op::MaxPool2 { input, argmax } => {
                    let dx = maxpool2_backward(&dy, argmax, self.nodes[input.0].value.shape());
                    accumulate(&mut grads, input.0, dx);
                }
                Op::UpsampleBilinear { input } => {
                    let dx = upsample_backward(&dy, self.nodes[input.0].value.shape());
                    accumulate(&mut grads, input.0, dx);
                }
                Op::Sigmoid { input } => {
                    let y = node.value.data();
                    let dx = dy
                        .data()
                        .iter()
                        .zip(y)
                        .map(|(&g, &s)| g * s * (1.0 - s))
                        .collect();
                    accumulate(&mut grads, input.0, dx);
                }
                Op::Relu { input } => {
                    let x = self.nodes[input.0].value.data();
                    let dx = dy
                        .data()
                        .iter()
                        .zip(x)
                        .map(|(&g, &v)| if v > 0.0 { g } else { 0.0 })
                        .collect();
                    accumulate(&mut grads, input.0, dx);
                }
                Op::Add { lhs, rhs } => {
                    if self.needs(*lhs) {
                        accumulate(&mut grads, lhs.0, dy.data().to_vec());
                    }
                    if self.needs(*rhs) {
                        accumulate(&mut grads, rhs.0, dy.data().to_vec());
                    }
                }
                Op::Scale { input, factor } => {
                    let dx = dy.data().iter().map(|&g| g * factor).collect();
                    accumulate(&mut grads, input.0, dx);
                }
                Op::SumAll { input } => {
                    let g = dy.data()[0];
                    let numel = self.nodes[input.0].value.numel();
                    accumulate(&mut grads, input.0, vec![g; numel]);
                }
                Op::ConcatChannels { inputs } => {
                    let oshape = node.value.shape();
                    let plane = oshape.h * oshape.w;
                    let mut c_off = 0;
                    for &src in inputs {
                        let sshape = self.nodes[src.0].value.shape();
                        if self.needs(src) {
                            let mut dx = vec![0.0f32; sshape.numel()];
                            for n in 0..oshape.n {
                                for c in 0..sshape.c {
                                    let from = oshape.offset(n, c_off + c, 0, 0);
                                    let to = sshape.offset(n, c, 0, 0);
                                    dx[to..to + plane].copy_from_slice(&dy.data()[from..from + plane]);
                                }
                            }
                            accumulate(&mut grads, src.0, dx);
                        }
                        c_off += sshape.c;
                    }
                }
                Op::BceWeighted { pred, neg_w, pos_w } => {
                    let dx = bce_backward(&self.nodes[pred.0].value, neg_w, pos_w, dy.data()[0]);
                    accumulate(&mut grads, pred.0, dx);
                }
            }
        }
        Ok(Gradients { grads })
    }
}

fn accumulate(grads: &mut [Option<Vec<f32>>], idx: usize, delta: Vec<f32>) {
    match &mut grads[idx] {
        Some(existing) => {
            for (e, d) in existing.iter_mut().zip(&delta) {
                *e += d;
            }
        }
        slot => *slot = Some(delta),
    }
}
