use crate::error::{Result, TensorError};
use crate::shape::Shape4;
use crate::tensor::Tensor4;

/// Single-channel 2-D map of per-pixel values, row-major. Prediction heads
/// produce these with values in (0, 1); ground-truth maps reuse the type with
/// values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProbMap {
    h: usize,
    w: usize,
    data: Vec<f32>,
}

impl EdgeProbMap {
    pub fn from_vec(h: usize, w: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != h * w {
            return Err(TensorError::DataLength {
                shape: format!("{h}x{w}"),
                expected: h * w,
                got: data.len(),
            });
        }
        Ok(Self { h, w, data })
    }

    pub fn zeros(h: usize, w: usize) -> Self {
        Self {
            h,
            w,
            data: vec![0.0; h * w],
        }
    }

    /// Extract channel `c` of batch item `n` as a 2-D map.
    pub fn from_tensor(t: &Tensor4, n: usize, c: usize) -> Self {
        let s = t.shape();
        Self {
            h: s.h,
            w: s.w,
            data: t.plane(n, c).to_vec(),
        }
    }

    /// View this map as a (1, 1, h, w) tensor.
    pub fn to_tensor(&self) -> Tensor4 {
        let shape = Shape4::new(1, 1, self.h, self.w).expect("map dims >= 1");
        Tensor4::from_vec(shape, self.data.clone()).expect("length matches")
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    #[inline]
    pub fn at(&self, y: usize, x: usize) -> f32 {
        self.data[y * self.w + x]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, v: f32) {
        self.data[y * self.w + x] = v;
    }

    pub fn row(&self, y: usize) -> &[f32] {
        &self.data[y * self.w..(y + 1) * self.w]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_round_trip() {
        let shape = Shape4::new(1, 2, 2, 3).unwrap();
        let t = Tensor4::from_vec(shape, (0..12).map(|v| v as f32).collect()).unwrap();
        let m = EdgeProbMap::from_tensor(&t, 0, 1);
        assert_eq!(m.at(0, 0), 6.0);
        assert_eq!(m.at(1, 2), 11.0);
        let back = m.to_tensor();
        assert_eq!(back.data(), m.data());
    }
}
