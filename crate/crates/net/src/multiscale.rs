//! Multi-scale inference: run the network over rescaled copies of the image,
//! bring each fused map back to the original resolution and average.

use bdcn_tensor::resize::{resize_map_bilinear, resize_tensor_bilinear};
use bdcn_tensor::{EdgeProbMap, Tensor4};

use crate::error::{NetError, Result};
use crate::network::Network;

pub fn predict_multiscale(net: &Network, image: &Tensor4, scales: &[f64]) -> Result<EdgeProbMap> {
    if scales.is_empty() {
        return Err(NetError::Config("scale list must not be empty".into()));
    }
    for &s in scales {
        if !(s.is_finite() && s > 0.0) {
            return Err(NetError::Config(format!("invalid scale {s}; must be > 0")));
        }
    }
    let ishape = image.shape();
    let (h, w) = (ishape.h, ishape.w);
    let min_side = net.config().min_input_side();

    let mut acc = vec![0.0f64; h * w];
    for &s in scales {
        let fused = if s == 1.0 {
            net.predict(image)?.fused
        } else {
            let th = ((h as f64 * s).round() as usize).max(min_side);
            let tw = ((w as f64 * s).round() as usize).max(min_side);
            let scaled = resize_tensor_bilinear(image, th, tw);
            let fused = net.predict(&scaled)?.fused;
            resize_map_bilinear(&fused, h, w)
        };
        for (a, &v) in acc.iter_mut().zip(fused.data()) {
            *a += v as f64;
        }
    }
    let inv = 1.0 / scales.len() as f64;
    let data = acc.iter().map(|&v| (v * inv) as f32).collect();
    Ok(EdgeProbMap::from_vec(h, w, data).expect("length matches"))
}
