pub mod eval;
pub mod inspect;
pub mod predict;
pub mod synth;
pub mod train;
