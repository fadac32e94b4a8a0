//! Library surface of the command-line driver; `main` is a thin wrapper so
//! integration tests can call the commands directly.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::eval::{cmd_eval, evaluate_maps, gather_inputs};
pub use commands::inspect::{cmd_inspect_checkpoint, cmd_inspect_config, inspect_config};
pub use commands::predict::cmd_predict;
pub use commands::synth::cmd_synth;
pub use commands::train::{cmd_train, load_dataset, StepStats, TrainOutcome, Trainer};
pub use config::RunConfig;
pub use error::{CliError, Result};
