use crate::error::{Result, TensorError};
use crate::shape::Shape4;

/// Dense rank-4 array of `f32` in NCHW order. Storage is single precision;
/// reductions inside ops accumulate in double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    shape: Shape4,
    data: Vec<f32>,
    requires_grad: bool,
}

impl Tensor4 {
    pub fn from_vec(shape: Shape4, data: Vec<f32>) -> Result<Self> {
        if data.len() != shape.numel() {
            return Err(TensorError::DataLength {
                shape: shape.to_string(),
                expected: shape.numel(),
                got: data.len(),
            });
        }
        Ok(Self {
            shape,
            data,
            requires_grad: false,
        })
    }

    pub fn zeros(shape: Shape4) -> Self {
        Self {
            shape,
            data: vec![0.0; shape.numel()],
            requires_grad: false,
        }
    }

    pub fn filled(shape: Shape4, value: f32) -> Self {
        Self {
            shape,
            data: vec![value; shape.numel()],
            requires_grad: false,
        }
    }

    pub fn scalar(value: f32) -> Self {
        Self {
            shape: Shape4 {
                n: 1,
                c: 1,
                h: 1,
                w: 1,
            },
            data: vec![value],
            requires_grad: false,
        }
    }

    pub fn with_grad(mut self) -> Self {
        self.requires_grad = true;
        self
    }

    pub fn set_requires_grad(&mut self, flag: bool) {
        self.requires_grad = flag;
    }

    pub fn requires_grad(&self) -> bool {
        self.requires_grad
    }

    pub fn shape(&self) -> Shape4 {
        self.shape
    }

    pub fn numel(&self) -> usize {
        self.shape.numel()
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    #[inline]
    pub fn at(&self, n: usize, c: usize, y: usize, x: usize) -> f32 {
        self.data[self.shape.offset(n, c, y, x)]
    }

    /// Contiguous (h*w) slice of one channel plane.
    pub fn plane(&self, n: usize, c: usize) -> &[f32] {
        let hw = self.shape.h * self.shape.w;
        let start = (n * self.shape.c + c) * hw;
        &self.data[start..start + hw]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn scalar_value(&self) -> f32 {
        debug_assert!(self.shape.is_scalar());
        self.data[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_vec_checks_length() {
        let shape = Shape4::new(1, 2, 2, 2).unwrap();
        assert!(Tensor4::from_vec(shape, vec![0.0; 8]).is_ok());
        assert!(Tensor4::from_vec(shape, vec![0.0; 7]).is_err());
    }

    #[test]
    fn plane_is_contiguous_channel() {
        let shape = Shape4::new(1, 2, 2, 2).unwrap();
        let t = Tensor4::from_vec(shape, (0..8).map(|v| v as f32).collect()).unwrap();
        assert_eq!(t.plane(0, 1), &[4.0, 5.0, 6.0, 7.0]);
        assert_eq!(t.at(0, 1, 1, 0), 6.0);
    }
}
