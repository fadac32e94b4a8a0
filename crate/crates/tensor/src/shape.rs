use std::fmt;

use crate::error::{Result, TensorError};

/// Dense rank-4 layout: (batch, channels, height, width), row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape4 {
    pub n: usize,
    pub c: usize,
    pub h: usize,
    pub w: usize,
}

impl Shape4 {
    pub fn new(n: usize, c: usize, h: usize, w: usize) -> Result<Self> {
        let s = Self { n, c, h, w };
        if n == 0 || c == 0 || h == 0 || w == 0 {
            return Err(TensorError::InvalidShape(s.to_string()));
        }
        Ok(s)
    }

    pub fn numel(&self) -> usize {
        self.n * self.c * self.h * self.w
    }

    /// Linear offset of element (n, c, y, x).
    #[inline]
    pub fn offset(&self, n: usize, c: usize, y: usize, x: usize) -> usize {
        ((n * self.c + c) * self.h + y) * self.w + x
    }

    pub fn is_scalar(&self) -> bool {
        self.numel() == 1
    }
}

impl fmt::Display for Shape4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}x{}", self.n, self.c, self.h, self.w)
    }
}

/// Geometry of a 2-D convolution: kernel size, stride, zero padding and
/// dilation. Dilation `r` samples the input with stride `r` inside the
/// kernel footprint, so the effective extent of a k-tap axis is
/// `r * (k - 1) + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvSpec {
    pub kernel: (usize, usize),
    pub stride: usize,
    pub padding: usize,
    pub dilation: usize,
}

impl ConvSpec {
    pub fn new(kernel: (usize, usize), stride: usize, padding: usize, dilation: usize) -> Self {
        Self {
            kernel,
            stride,
            padding,
            dilation,
        }
    }

    /// Same-size 3x3 convolution at dilation `r` (pad = r).
    pub fn same3x3(dilation: usize) -> Self {
        Self::new((3, 3), 1, dilation, dilation)
    }

    pub fn pointwise() -> Self {
        Self::new((1, 1), 1, 0, 1)
    }

    /// Effective kernel extent along (h, w).
    pub fn extent(&self) -> (usize, usize) {
        (
            self.dilation * (self.kernel.0 - 1) + 1,
            self.dilation * (self.kernel.1 - 1) + 1,
        )
    }

    /// Output size for an `h x w` input:
    /// `floor((len + 2*padding - dilation*(k-1) - 1) / stride) + 1`.
    /// Errors when either output dimension would be < 1.
    pub fn output_hw(&self, h: usize, w: usize) -> Result<(usize, usize)> {
        let out = |len: usize, k: usize| -> Option<usize> {
            let span = len + 2 * self.padding;
            let ext = self.dilation * (k - 1) + 1;
            if span < ext {
                return None;
            }
            Some((span - ext) / self.stride + 1)
        };
        match (out(h, self.kernel.0), out(w, self.kernel.1)) {
            (Some(oh), Some(ow)) => Ok((oh, ow)),
            _ => Err(TensorError::EmptyConvOutput {
                in_h: h,
                in_w: w,
                spec: self.to_string(),
            }),
        }
    }
}

impl fmt::Display for ConvSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k{}x{} s{} p{} d{}",
            self.kernel.0, self.kernel.1, self.stride, self.padding, self.dilation
        )
    }
}
