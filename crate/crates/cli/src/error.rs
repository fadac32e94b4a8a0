use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config {path}: {reason}")]
    Config { path: PathBuf, reason: String },

    #[error("{0}")]
    Usage(String),

    #[error("training aborted: {0}")]
    Training(String),

    #[error("evaluation: missing predictions for: {}", ids.join(", "))]
    MissingPredictions { ids: Vec<String> },

    #[error(transparent)]
    Net(#[from] bdcn_net::NetError),

    #[error(transparent)]
    Loss(#[from] bdcn_loss::LossError),

    #[error(transparent)]
    Data(#[from] bdcn_data::DataError),

    #[error(transparent)]
    Match(#[from] bdcn_eval::MatchError),

    #[error(transparent)]
    Tensor(#[from] bdcn_tensor::TensorError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
