use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Tensor(#[from] bdcn_tensor::TensorError),
}

pub type Result<T> = std::result::Result<T, NetError>;
