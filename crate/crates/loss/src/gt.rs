use crate::error::{LossError, Result};
use crate::targets::TargetMap;

/// Per-pixel annotator agreement in [0, 1] with the gamma band that splits
/// pixels into positives (y > gamma), negatives (y == 0) and excluded
/// (0 < y <= gamma, dropped from the loss entirely).
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusGT {
    h: usize,
    w: usize,
    values: Vec<f32>,
    gamma: f32,
}

impl ConsensusGT {
    pub fn new(h: usize, w: usize, values: Vec<f32>, gamma: f32) -> Result<Self> {
        if values.len() != h * w {
            return Err(LossError::Shape(format!(
                "ground truth has {} values for {}x{}",
                values.len(),
                h,
                w
            )));
        }
        if !(0.0..1.0).contains(&gamma) || gamma == 0.0 {
            return Err(LossError::Invalid(format!("gamma {gamma} not in (0, 1)")));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(LossError::Invalid("ground-truth values outside [0, 1]".into()));
        }
        Ok(Self { h, w, values, gamma })
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn gamma(&self) -> f32 {
        self.gamma
    }

    #[inline]
    pub fn is_positive(&self, i: usize) -> bool {
        self.values[i] > self.gamma
    }

    #[inline]
    pub fn is_negative(&self, i: usize) -> bool {
        self.values[i] == 0.0
    }

    pub fn positive_count(&self) -> usize {
        (0..self.values.len()).filter(|&i| self.is_positive(i)).count()
    }

    pub fn negative_count(&self) -> usize {
        (0..self.values.len()).filter(|&i| self.is_negative(i)).count()
    }

    /// Loss target for heads supervised directly by the raw annotation
    /// (the fused prediction, and the boundary blocks of each cascade).
    pub fn target_map(&self) -> TargetMap {
        TargetMap {
            h: self.h,
            w: self.w,
            values: self.values.clone(),
            pos: (0..self.values.len()).map(|i| self.is_positive(i)).collect(),
            neg: (0..self.values.len()).map(|i| self.is_negative(i)).collect(),
        }
    }
}
