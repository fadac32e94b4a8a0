//! Plain (non-differentiable) resampling helpers shared by the data pipeline
//! and multi-scale inference. Bilinear resizing uses the align-corners
//! convention: source coordinate = dst * (src_len - 1) / (dst_len - 1), which
//! maps endpoints onto endpoints exactly. Downscaling applies the same mapping
//! without an anti-aliasing prefilter.

use crate::map::EdgeProbMap;
use crate::shape::Shape4;
use crate::tensor::Tensor4;

/// Align-corners source coordinate and interpolation weights for one axis.
#[inline]
fn axis_lerp(dst: usize, dst_len: usize, src_len: usize) -> (usize, usize, f32) {
    if dst_len <= 1 || src_len <= 1 {
        return (0, 0, 0.0);
    }
    let pos = dst as f64 * (src_len - 1) as f64 / (dst_len - 1) as f64;
    let lo = pos.floor() as usize;
    let lo = lo.min(src_len - 1);
    let hi = (lo + 1).min(src_len - 1);
    (lo, hi, (pos - lo as f64) as f32)
}

/// Bilinear resize of one row-major `h x w` plane to `th x tw`.
pub fn resize_bilinear_plane(src: &[f32], h: usize, w: usize, th: usize, tw: usize) -> Vec<f32> {
    assert_eq!(src.len(), h * w);
    let mut out = vec![0.0f32; th * tw];
    let xmap: Vec<(usize, usize, f32)> = (0..tw).map(|x| axis_lerp(x, tw, w)).collect();
    for ty in 0..th {
        let (y0, y1, fy) = axis_lerp(ty, th, h);
        let row0 = &src[y0 * w..y0 * w + w];
        let row1 = &src[y1 * w..y1 * w + w];
        let dst = &mut out[ty * tw..(ty + 1) * tw];
        for (d, &(x0, x1, fx)) in dst.iter_mut().zip(&xmap) {
            let top = row0[x0] + (row0[x1] - row0[x0]) * fx;
            let bot = row1[x0] + (row1[x1] - row1[x0]) * fx;
            *d = top + (bot - top) * fy;
        }
    }
    out
}

/// Nearest-neighbor resize of one plane; used for label maps so edges stay
/// thin and values stay in the original set.
pub fn resize_nearest_plane(src: &[f32], h: usize, w: usize, th: usize, tw: usize) -> Vec<f32> {
    assert_eq!(src.len(), h * w);
    let pick = |dst: usize, dst_len: usize, src_len: usize| -> usize {
        if dst_len <= 1 || src_len <= 1 {
            return 0;
        }
        let pos = dst as f64 * (src_len - 1) as f64 / (dst_len - 1) as f64;
        (pos.round() as usize).min(src_len - 1)
    };
    let xmap: Vec<usize> = (0..tw).map(|x| pick(x, tw, w)).collect();
    let mut out = vec![0.0f32; th * tw];
    for ty in 0..th {
        let sy = pick(ty, th, h);
        let row = &src[sy * w..sy * w + w];
        let dst = &mut out[ty * tw..(ty + 1) * tw];
        for (d, &sx) in dst.iter_mut().zip(&xmap) {
            *d = row[sx];
        }
    }
    out
}

/// Bilinear resize applied per (n, c) plane of a tensor.
pub fn resize_tensor_bilinear(t: &Tensor4, th: usize, tw: usize) -> Tensor4 {
    let s = t.shape();
    let shape = Shape4::new(s.n, s.c, th, tw).expect("target dims >= 1");
    let mut out = Tensor4::zeros(shape);
    let plane = th * tw;
    for n in 0..s.n {
        for c in 0..s.c {
            let resized = resize_bilinear_plane(t.plane(n, c), s.h, s.w, th, tw);
            let start = (n * s.c + c) * plane;
            out.data_mut()[start..start + plane].copy_from_slice(&resized);
        }
    }
    out
}

pub fn resize_map_bilinear(m: &EdgeProbMap, th: usize, tw: usize) -> EdgeProbMap {
    let data = resize_bilinear_plane(m.data(), m.height(), m.width(), th, tw);
    EdgeProbMap::from_vec(th, tw, data).expect("length matches")
}

pub fn resize_map_nearest(m: &EdgeProbMap, th: usize, tw: usize) -> EdgeProbMap {
    let data = resize_nearest_plane(m.data(), m.height(), m.width(), th, tw);
    EdgeProbMap::from_vec(th, tw, data).expect("length matches")
}
