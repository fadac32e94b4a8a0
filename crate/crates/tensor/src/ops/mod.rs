pub mod bce;
pub mod conv;
pub mod pool;
pub mod upsample;
