//! Data pipeline: raster IO, manifest-driven sample loading, deterministic
//! augmentation and synthetic shape datasets.

pub mod augment;
pub mod error;
pub mod raster;
pub mod sample;
pub mod synth;

pub use augment::{augment, AugmentSpec};
pub use error::{DataError, Result};
pub use sample::{consensus_of, load_sample, Manifest, ManifestEntry, Sample};
pub use synth::{synth_shapes, ShapeKind, ShapeSpec, SizeRegime, SynthSample};
