//! Layer-specific cascade supervision and the balanced training loss.

pub mod bce;
pub mod error;
pub mod gt;
pub mod targets;
pub mod total;

pub use bce::{alpha_beta, balanced_bce};
pub use error::{LossError, Result};
pub use gt::ConsensusGT;
pub use targets::{build_cascade_targets, CascadeTargets, TargetMap};
pub use total::{naive_summed_loss, total_loss, TotalLoss};
