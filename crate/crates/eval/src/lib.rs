//! Edge-benchmark evaluation: NMS thinning, tolerance-radius correspondence
//! matching, threshold sweep and ODS/OIS/AP summaries.

pub mod export;
pub mod matching;
pub mod nms;
pub mod summary;
pub mod sweep;

pub use export::{summary_text, write_per_image_csv, write_pr_csv, write_summary};
pub use matching::{match_edges, match_radius, BinaryMap, MatchCounts, MatchError};
pub use nms::nms_thin;
pub use summary::{f_measure, precision, recall, summarize, EvalSummary, PRPoint, PerImageBest};
pub use sweep::{default_thresholds, sweep_thresholds, SweepResult};

/// Default match tolerance (fraction of the image diagonal) for BSDS-style
/// data; NYUD-style data conventionally uses 0.011.
pub const DEFAULT_TOLERANCE: f64 = 0.0075;
