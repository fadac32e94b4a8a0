//! Dilated 2-D convolution kernels (forward and the three backward passes).
//!
//! The sampling rule at output location (i, j) for dilation `r` is
//! `y[i][j] = sum_{m,n} x[i*stride + r*m - pad][j*stride + r*n - pad] * w[m][n]`
//! per (out-channel, in-channel) pair, with zero padding outside the input.
//!
//! All loops accumulate in f64 and are arranged as shift-and-accumulate over
//! contiguous rows so the stride-1 path vectorizes. Parallelism partitions
//! output planes (or weight slices), so results are bitwise deterministic.

use rayon::prelude::*;

use crate::error::{Result, TensorError};
use crate::shape::{ConvSpec, Shape4};
use crate::tensor::Tensor4;

/// Valid output index range [lo, hi] for one kernel tap, or None when the tap
/// never lands inside the input.
#[inline]
fn tap_range(out_len: usize, in_len: usize, stride: usize, pad: usize, k_off: usize) -> Option<(usize, usize)> {
    // in_idx = out_idx * stride + k_off - pad must lie in [0, in_len).
    let d = pad as isize - k_off as isize;
    let lo = if d <= 0 {
        0
    } else {
        (d as usize + stride - 1) / stride
    };
    let rhs = in_len as isize - 1 + pad as isize - k_off as isize;
    if rhs < 0 {
        return None;
    }
    let hi = (rhs as usize / stride).min(out_len - 1);
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}

pub fn check_conv_shapes(input: Shape4, weight: Shape4, bias: Option<usize>, spec: ConvSpec) -> Result<(usize, usize)> {
    if weight.h != spec.kernel.0 || weight.w != spec.kernel.1 {
        return Err(TensorError::ShapeMismatch {
            context: "conv2d weight kernel",
            expected: format!("{}x{}", spec.kernel.0, spec.kernel.1),
            got: format!("{}x{}", weight.h, weight.w),
        });
    }
    if weight.c != input.c {
        return Err(TensorError::ShapeMismatch {
            context: "conv2d input channels",
            expected: weight.c.to_string(),
            got: input.c.to_string(),
        });
    }
    if let Some(blen) = bias {
        if blen != weight.n {
            return Err(TensorError::ShapeMismatch {
                context: "conv2d bias",
                expected: weight.n.to_string(),
                got: blen.to_string(),
            });
        }
    }
    spec.output_hw(input.h, input.w)
}

pub fn conv2d_forward(input: &Tensor4, weight: &Tensor4, bias: Option<&[f32]>, spec: ConvSpec) -> Result<Tensor4> {
    let ishape = input.shape();
    let wshape = weight.shape();
    let (oh, ow) = check_conv_shapes(ishape, wshape, bias.map(|b| b.len()), spec)?;
    let (c_out, c_in) = (wshape.n, wshape.c);
    let (kh, kw) = spec.kernel;
    let (s, p, r) = (spec.stride, spec.padding, spec.dilation);
    let oshape = Shape4::new(ishape.n, c_out, oh, ow)?;
    let mut out = Tensor4::zeros(oshape);

    let plane = oh * ow;
    out.data_mut()
        .par_chunks_mut(plane)
        .enumerate()
        .for_each(|(idx, out_plane)| {
            let n = idx / c_out;
            let co = idx % c_out;
            let b = bias.map_or(0.0, |b| b[co]) as f64;
            let mut acc = vec![b; plane];
            for ci in 0..c_in {
                let x = input.plane(n, ci);
                for m in 0..kh {
                    let Some((oy_lo, oy_hi)) = tap_range(oh, ishape.h, s, p, r * m) else {
                        continue;
                    };
                    for nk in 0..kw {
                        let w = weight.at(co, ci, m, nk);
                        if w == 0.0 {
                            continue;
                        }
                        let w = w as f64;
                        let Some((ox_lo, ox_hi)) = tap_range(ow, ishape.w, s, p, r * nk) else {
                            continue;
                        };
                        let x_off = (ox_lo * s + r * nk) as isize - p as isize;
                        debug_assert!(x_off >= 0);
                        let x_off = x_off as usize;
                        for oy in oy_lo..=oy_hi {
                            let iy = oy * s + r * m - p;
                            let x_row = &x[iy * ishape.w..(iy + 1) * ishape.w];
                            let acc_row = &mut acc[oy * ow + ox_lo..=oy * ow + ox_hi];
                            if s == 1 {
                                let x_seg = &x_row[x_off..x_off + acc_row.len()];
                                for (a, &xv) in acc_row.iter_mut().zip(x_seg) {
                                    *a += w * xv as f64;
                                }
                            } else {
                                for (i, a) in acc_row.iter_mut().enumerate() {
                                    *a += w * x_row[x_off + i * s] as f64;
                                }
                            }
                        }
                    }
                }
            }
            for (o, a) in out_plane.iter_mut().zip(&acc) {
                *o = *a as f32;
            }
        });
    Ok(out)
}

/// Gradient w.r.t. the convolution input (scatter of dy through the taps).
pub fn conv2d_backward_input(dy: &Tensor4, weight: &Tensor4, input_shape: Shape4, spec: ConvSpec) -> Vec<f32> {
    let wshape = weight.shape();
    let (c_out, c_in) = (wshape.n, wshape.c);
    let (kh, kw) = spec.kernel;
    let (s, p, r) = (spec.stride, spec.padding, spec.dilation);
    let dys = dy.shape();
    let (oh, ow) = (dys.h, dys.w);
    let plane = input_shape.h * input_shape.w;
    let mut dx = vec![0.0f32; input_shape.numel()];

    dx.par_chunks_mut(plane).enumerate().for_each(|(idx, dx_plane)| {
        let n = idx / c_in;
        let ci = idx % c_in;
        let mut acc = vec![0.0f64; plane];
        for co in 0..c_out {
            let g = dy.plane(n, co);
            for m in 0..kh {
                let Some((oy_lo, oy_hi)) = tap_range(oh, input_shape.h, s, p, r * m) else {
                    continue;
                };
                for nk in 0..kw {
                    let w = weight.at(co, ci, m, nk);
                    if w == 0.0 {
                        continue;
                    }
                    let w = w as f64;
                    let Some((ox_lo, ox_hi)) = tap_range(ow, input_shape.w, s, p, r * nk) else {
                        continue;
                    };
                    let x_off = ox_lo * s + r * nk - p;
                    for oy in oy_lo..=oy_hi {
                        let iy = oy * s + r * m - p;
                        let g_row = &g[oy * ow + ox_lo..=oy * ow + ox_hi];
                        let a_row = &mut acc[iy * input_shape.w..(iy + 1) * input_shape.w];
                        if s == 1 {
                            let a_seg = &mut a_row[x_off..x_off + g_row.len()];
                            for (a, &gv) in a_seg.iter_mut().zip(g_row) {
                                *a += w * gv as f64;
                            }
                        } else {
                            for (i, &gv) in g_row.iter().enumerate() {
                                a_row[x_off + i * s] += w * gv as f64;
                            }
                        }
                    }
                }
            }
        }
        for (d, a) in dx_plane.iter_mut().zip(&acc) {
            *d = *a as f32;
        }
    });
    dx
}

/// Dot product with four independent accumulators; fixed reduction order.
#[inline]
fn dot4(a: &[f32], b: &[f32]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        let j = i * 4;
        acc[0] += a[j] as f64 * b[j] as f64;
        acc[1] += a[j + 1] as f64 * b[j + 1] as f64;
        acc[2] += a[j + 2] as f64 * b[j + 2] as f64;
        acc[3] += a[j + 3] as f64 * b[j + 3] as f64;
    }
    let mut tail = 0.0f64;
    for j in chunks * 4..a.len() {
        tail += a[j] as f64 * b[j] as f64;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Gradient w.r.t. the convolution weights.
pub fn conv2d_backward_weight(dy: &Tensor4, input: &Tensor4, weight_shape: Shape4, spec: ConvSpec) -> Vec<f32> {
    let ishape = input.shape();
    let c_in = weight_shape.c;
    let (kh, kw) = spec.kernel;
    let (s, p, r) = (spec.stride, spec.padding, spec.dilation);
    let dys = dy.shape();
    let (oh, ow) = (dys.h, dys.w);
    let mut dw = vec![0.0f32; weight_shape.numel()];

    dw.par_chunks_mut(kh * kw).enumerate().for_each(|(idx, dw_tap)| {
        let co = idx / c_in;
        let ci = idx % c_in;
        for m in 0..kh {
            let Some((oy_lo, oy_hi)) = tap_range(oh, ishape.h, s, p, r * m) else {
                continue;
            };
            for nk in 0..kw {
                let Some((ox_lo, ox_hi)) = tap_range(ow, ishape.w, s, p, r * nk) else {
                    continue;
                };
                let x_off = ox_lo * s + r * nk - p;
                let seg = ox_hi - ox_lo + 1;
                let mut sum = 0.0f64;
                for n in 0..ishape.n {
                    let g = dy.plane(n, co);
                    let x = input.plane(n, ci);
                    for oy in oy_lo..=oy_hi {
                        let iy = oy * s + r * m - p;
                        let g_row = &g[oy * ow + ox_lo..oy * ow + ox_lo + seg];
                        if s == 1 {
                            let x_row = &x[iy * ishape.w + x_off..iy * ishape.w + x_off + seg];
                            sum += dot4(g_row, x_row);
                        } else {
                            let x_row = &x[iy * ishape.w..(iy + 1) * ishape.w];
                            for (i, &gv) in g_row.iter().enumerate() {
                                sum += gv as f64 * x_row[x_off + i * s] as f64;
                            }
                        }
                    }
                }
                dw_tap[m * kw + nk] = sum as f32;
            }
        }
    });
    dw
}

/// Gradient w.r.t. the per-channel bias: plain sum of dy over each channel.
pub fn conv2d_backward_bias(dy: &Tensor4) -> Vec<f32> {
    let s = dy.shape();
    let mut db = vec![0.0f32; s.c];
    for co in 0..s.c {
        let mut sum = 0.0f64;
        for n in 0..s.n {
            for &g in dy.plane(n, co) {
                sum += g as f64;
            }
        }
        db[co] = sum as f32;
    }
    db
}
