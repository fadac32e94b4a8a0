//! Differentiable align-corners bilinear upsampling. The backward pass
//! scatters each output gradient to the four source corners with the same
//! interpolation weights used in the forward pass.

use rayon::prelude::*;

use crate::error::{Result, TensorError};
use crate::resize::resize_bilinear_plane;
use crate::shape::Shape4;
use crate::tensor::Tensor4;

pub fn upsample_forward(input: &Tensor4, target_h: usize, target_w: usize) -> Result<Tensor4> {
    let s = input.shape();
    if target_h < s.h || target_w < s.w {
        return Err(TensorError::UpsampleShrinks {
            in_h: s.h,
            in_w: s.w,
            target_h,
            target_w,
        });
    }
    let oshape = Shape4::new(s.n, s.c, target_h, target_w)?;
    let mut out = Tensor4::zeros(oshape);
    let plane = target_h * target_w;
    out.data_mut()
        .par_chunks_mut(plane)
        .enumerate()
        .for_each(|(idx, out_plane)| {
            let n = idx / s.c;
            let c = idx % s.c;
            let resized = resize_bilinear_plane(input.plane(n, c), s.h, s.w, target_h, target_w);
            out_plane.copy_from_slice(&resized);
        });
    Ok(out)
}

#[inline]
fn axis_lerp(dst: usize, dst_len: usize, src_len: usize) -> (usize, usize, f64) {
    if dst_len <= 1 || src_len <= 1 {
        return (0, 0, 0.0);
    }
    let pos = dst as f64 * (src_len - 1) as f64 / (dst_len - 1) as f64;
    let lo = (pos.floor() as usize).min(src_len - 1);
    let hi = (lo + 1).min(src_len - 1);
    (lo, hi, pos - lo as f64)
}

pub fn upsample_backward(dy: &Tensor4, input_shape: Shape4) -> Vec<f32> {
    let dys = dy.shape();
    let (th, tw) = (dys.h, dys.w);
    let (h, w) = (input_shape.h, input_shape.w);
    let xmap: Vec<(usize, usize, f64)> = (0..tw).map(|x| axis_lerp(x, tw, w)).collect();
    let ymap: Vec<(usize, usize, f64)> = (0..th).map(|y| axis_lerp(y, th, h)).collect();
    let plane = h * w;
    let mut dx = vec![0.0f32; input_shape.numel()];
    dx.par_chunks_mut(plane).enumerate().for_each(|(idx, dx_plane)| {
        let g = &dy.data()[idx * th * tw..(idx + 1) * th * tw];
        let mut acc = vec![0.0f64; plane];
        for ty in 0..th {
            let (y0, y1, fy) = ymap[ty];
            let row = &g[ty * tw..(ty + 1) * tw];
            for (tx, &gv) in row.iter().enumerate() {
                let (x0, x1, fx) = xmap[tx];
                let gv = gv as f64;
                acc[y0 * w + x0] += gv * (1.0 - fy) * (1.0 - fx);
                acc[y0 * w + x1] += gv * (1.0 - fy) * fx;
                acc[y1 * w + x0] += gv * fy * (1.0 - fx);
                acc[y1 * w + x1] += gv * fy * fx;
            }
        }
        for (d, a) in dx_plane.iter_mut().zip(&acc) {
            *d = *a as f32;
        }
    });
    dx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_shrinking() {
        let t = Tensor4::zeros(Shape4::new(1, 1, 4, 4).unwrap());
        assert!(upsample_forward(&t, 3, 4).is_err());
    }

    #[test]
    fn constant_map_stays_constant() {
        let t = Tensor4::filled(Shape4::new(1, 2, 3, 3).unwrap(), 0.7);
        let up = upsample_forward(&t, 7, 5).unwrap();
        assert!(up.data().iter().all(|&v| (v - 0.7).abs() < 1e-6));
    }

    #[test]
    fn backward_of_constant_grad_conserves_mass() {
        let shape = Shape4::new(1, 1, 3, 3).unwrap();
        let dy = Tensor4::filled(Shape4::new(1, 1, 6, 6).unwrap(), 1.0);
        let dx = upsample_backward(&dy, shape);
        let total: f64 = dx.iter().map(|&v| v as f64).sum();
        assert!((total - 36.0).abs() < 1e-4);
    }
}
