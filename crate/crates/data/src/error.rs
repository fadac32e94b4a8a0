use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("raster {path}: {reason}")]
    Raster { path: PathBuf, reason: String },

    #[error("ingestion: {0}")]
    Ingest(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Loss(#[from] bdcn_loss::LossError),

    #[error(transparent)]
    Tensor(#[from] bdcn_tensor::TensorError),
}

pub type Result<T> = std::result::Result<T, DataError>;
