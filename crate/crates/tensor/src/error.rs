use thiserror::Error;

/// Errors surfaced by tensor construction, graph ops and the optimizer.
#[derive(Debug, Error)]
pub enum TensorError {
    #[error("{context}: shape mismatch, expected {expected}, got {got}")]
    ShapeMismatch {
        context: &'static str,
        expected: String,
        got: String,
    },

    #[error("invalid shape {0}: all dimensions must be >= 1")]
    InvalidShape(String),

    #[error("data length {got} does not match shape {shape} ({expected} elements)")]
    DataLength {
        shape: String,
        expected: usize,
        got: usize,
    },

    #[error("convolution of {in_h}x{in_w} input with {spec} yields empty output")]
    EmptyConvOutput {
        in_h: usize,
        in_w: usize,
        spec: String,
    },

    #[error("upsample target {target_h}x{target_w} is smaller than input {in_h}x{in_w}")]
    UpsampleShrinks {
        in_h: usize,
        in_w: usize,
        target_h: usize,
        target_w: usize,
    },

    #[error("backward requires a scalar loss, got shape {0}")]
    NonScalarLoss(String),

    #[error("non-finite gradient for parameter '{name}'")]
    NonFiniteGradient { name: String },

    #[error("optimizer state holds {state} velocity buffers but {params} parameters were given")]
    OptimStateMismatch { state: usize, params: usize },

    #[error("checkpoint integrity: {0}")]
    CheckpointIntegrity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, TensorError>;
