//! Minimal dense-tensor engine with reverse-mode automatic differentiation.
//!
//! Covers exactly the operations a multi-scale edge-detection CNN needs:
//! dilated 2-D convolution, 2x2 max pooling, align-corners bilinear
//! upsampling, sigmoid/ReLU, channel concatenation, weighted BCE, and SGD
//! with momentum. Storage is f32; reductions accumulate in f64.
//!
//! Forward/backward of one graph is single-writer. Internal parallelism
//! partitions output planes, so results are bitwise deterministic for a
//! fixed input regardless of thread count.

pub mod checkpoint;
pub mod error;
pub mod graph;
pub mod map;
pub mod ops;
pub mod optim;
pub mod resize;
pub mod shape;
pub mod tensor;

pub use error::{Result, TensorError};
pub use graph::{Gradients, Graph, NodeId};
pub use map::EdgeProbMap;
pub use optim::{sgd_step, OptimState};
pub use shape::{ConvSpec, Shape4};
pub use tensor::Tensor4;
