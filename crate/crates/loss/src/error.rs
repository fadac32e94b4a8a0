use thiserror::Error;

#[derive(Debug, Error)]
pub enum LossError {
    #[error("shape: {0}")]
    Shape(String),

    #[error("invalid value: {0}")]
    Invalid(String),

    #[error(transparent)]
    Tensor(#[from] bdcn_tensor::TensorError),
}

pub type Result<T> = std::result::Result<T, LossError>;
