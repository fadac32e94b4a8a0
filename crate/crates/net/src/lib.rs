//! BDCN-style edge network: S incremental-detection blocks built on a VGG16
//! channel plan, scale enhancement modules after every convolution, twin
//! per-block score heads (shallow-to-deep and deep-to-shallow) and a 1x1
//! fusion over all side logits.

pub mod config;
pub mod error;
pub mod inspect;
pub mod multiscale;
pub mod network;

pub use config::{BdcnConfig, WeightInit, VGG16_PLAN};
pub use error::{NetError, Result};
pub use inspect::{architecture_report, param_count, ArchReport};
pub use multiscale::predict_multiscale;
pub use network::{BdcnOutputs, ForwardPass, Network};
