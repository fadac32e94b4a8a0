//! 2x2 stride-2 max pooling. Odd spatial sizes are handled by replicating the
//! last row/column (implemented as index clamping), so output dims are
//! ceil(h/2) x ceil(w/2). Ties route the gradient to the first window position
//! in row-major order; a replicated cell can never beat its original because
//! the values are equal and the original is visited first.

use rayon::prelude::*;

use crate::shape::Shape4;
use crate::tensor::Tensor4;

pub struct PoolOutput {
    pub output: Tensor4,
    /// Per output element: linear index into the input plane of the max.
    pub argmax: Vec<u32>,
}

pub fn maxpool2_forward(input: &Tensor4) -> PoolOutput {
    let s = input.shape();
    let oh = s.h.div_ceil(2);
    let ow = s.w.div_ceil(2);
    let oshape = Shape4::new(s.n, s.c, oh, ow).expect("pool output dims >= 1");
    let mut output = Tensor4::zeros(oshape);
    let mut argmax = vec![0u32; oshape.numel()];
    let plane = oh * ow;

    output
        .data_mut()
        .par_chunks_mut(plane)
        .zip(argmax.par_chunks_mut(plane))
        .enumerate()
        .for_each(|(idx, (out_plane, arg_plane))| {
            let n = idx / s.c;
            let c = idx % s.c;
            let x = input.plane(n, c);
            for oy in 0..oh {
                for ox in 0..ow {
                    let mut best = f32::NEG_INFINITY;
                    let mut best_idx = 0u32;
                    for dy in 0..2 {
                        for dx in 0..2 {
                            let iy = (2 * oy + dy).min(s.h - 1);
                            let ix = (2 * ox + dx).min(s.w - 1);
                            let lin = iy * s.w + ix;
                            let v = x[lin];
                            if v > best {
                                best = v;
                                best_idx = lin as u32;
                            }
                        }
                    }
                    out_plane[oy * ow + ox] = best;
                    arg_plane[oy * ow + ox] = best_idx;
                }
            }
        });
    PoolOutput { output, argmax }
}

pub fn maxpool2_backward(dy: &Tensor4, argmax: &[u32], input_shape: Shape4) -> Vec<f32> {
    let plane = input_shape.h * input_shape.w;
    let dys = dy.shape();
    let oplane = dys.h * dys.w;
    let mut dx = vec![0.0f32; input_shape.numel()];
    dx.par_chunks_mut(plane).enumerate().for_each(|(idx, dx_plane)| {
        let g = &dy.data()[idx * oplane..(idx + 1) * oplane];
        let arg = &argmax[idx * oplane..(idx + 1) * oplane];
        for (&gv, &a) in g.iter().zip(arg) {
            dx_plane[a as usize] += gv;
        }
    });
    dx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let shape = Shape4::new(1, 1, 2, 2).unwrap();
        let t = Tensor4::from_vec(shape, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let out = maxpool2_forward(&t);
        assert_eq!(out.output.data(), &[4.0]);
        assert_eq!(out.argmax, vec![3]);
    }

    #[test]
    fn constant_input_stays_constant() {
        let t = Tensor4::filled(Shape4::new(1, 2, 6, 4).unwrap(), 0.3);
        let out = maxpool2_forward(&t);
        assert_eq!(out.output.shape().h, 3);
        assert_eq!(out.output.shape().w, 2);
        assert!(out.output.data().iter().all(|&v| v == 0.3));
    }

    #[test]
    fn matches_window_scan_oracle() {
        let shape = Shape4::new(1, 1, 8, 8).unwrap();
        let data: Vec<f32> = (0..64).map(|i| ((i * 37 + 11) % 64) as f32 * 0.1).collect();
        let t = Tensor4::from_vec(shape, data.clone()).unwrap();
        let out = maxpool2_forward(&t);
        for oy in 0..4 {
            for ox in 0..4 {
                let mut expect = f32::NEG_INFINITY;
                for dy in 0..2 {
                    for dx in 0..2 {
                        expect = expect.max(data[(2 * oy + dy) * 8 + 2 * ox + dx]);
                    }
                }
                assert_eq!(out.output.at(0, 0, oy, ox), expect);
            }
        }
    }

    #[test]
    fn odd_dims_replicate_edge() {
        let shape = Shape4::new(1, 1, 3, 3).unwrap();
        let t = Tensor4::from_vec(shape, vec![1., 2., 3., 4., 5., 6., 7., 8., 9.]).unwrap();
        let out = maxpool2_forward(&t);
        assert_eq!(out.output.shape().h, 2);
        assert_eq!(out.output.data(), &[5.0, 6.0, 8.0, 9.0]);
    }

    #[test]
    fn ties_route_to_first_occurrence() {
        let shape = Shape4::new(1, 1, 2, 2).unwrap();
        let t = Tensor4::from_vec(shape, vec![7.0, 7.0, 7.0, 7.0]).unwrap();
        let out = maxpool2_forward(&t);
        assert_eq!(out.argmax, vec![0]);
        let dy = Tensor4::filled(Shape4::new(1, 1, 1, 1).unwrap(), 2.5);
        let dx = maxpool2_backward(&dy, &out.argmax, shape);
        assert_eq!(dx, vec![2.5, 0.0, 0.0, 0.0]);
    }
}
