//! Non-maximum suppression along the gradient-normal direction.
//!
//! Orientation is estimated from central differences of a 5x5
//! triangularly-smoothed copy of the probability map (replicate borders).
//! A pixel survives when its raw probability is >= the bilinearly
//! interpolated raw values one pixel away on both sides along the gradient
//! direction; surviving pixels keep their probability, everything else drops
//! to zero. Zero-gradient pixels (plateaus, flat ridges viewed lengthwise)
//! are kept, and the non-strict comparison makes thin binary maps a fixed
//! point of the operator.

use bdcn_tensor::EdgeProbMap;

const TRIANGLE: [f32; 5] = [1.0, 2.0, 3.0, 2.0, 1.0];

fn smooth_triangle_5x5(src: &EdgeProbMap) -> Vec<f32> {
    let (h, w) = (src.height(), src.width());
    let clamp = |v: isize, hi: usize| -> usize { v.clamp(0, hi as isize - 1) as usize };
    // Separable pass: rows then columns, 1/9 normalization each.
    let mut rows = vec![0.0f32; h * w];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0f64;
            for (k, &t) in TRIANGLE.iter().enumerate() {
                let xx = clamp(x as isize + k as isize - 2, w);
                acc += t as f64 * src.at(y, xx) as f64;
            }
            rows[y * w + x] = (acc / 9.0) as f32;
        }
    }
    let mut out = vec![0.0f32; h * w];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0f64;
            for (k, &t) in TRIANGLE.iter().enumerate() {
                let yy = clamp(y as isize + k as isize - 2, h);
                acc += t as f64 * rows[yy * w + x] as f64;
            }
            out[y * w + x] = (acc / 9.0) as f32;
        }
    }
    out
}

fn sample_bilinear_clamped(map: &EdgeProbMap, y: f64, x: f64) -> f64 {
    let (h, w) = (map.height(), map.width());
    let yc = y.clamp(0.0, (h - 1) as f64);
    let xc = x.clamp(0.0, (w - 1) as f64);
    let y0 = yc.floor() as usize;
    let x0 = xc.floor() as usize;
    let y1 = (y0 + 1).min(h - 1);
    let x1 = (x0 + 1).min(w - 1);
    let fy = yc - y0 as f64;
    let fx = xc - x0 as f64;
    let top = map.at(y0, x0) as f64 * (1.0 - fx) + map.at(y0, x1) as f64 * fx;
    let bot = map.at(y1, x0) as f64 * (1.0 - fx) + map.at(y1, x1) as f64 * fx;
    top * (1.0 - fy) + bot * fy
}

pub fn nms_thin(prob: &EdgeProbMap) -> EdgeProbMap {
    let (h, w) = (prob.height(), prob.width());
    let smoothed = smooth_triangle_5x5(prob);
    let grad = |y: usize, x: usize| -> (f64, f64) {
        let xm = x.saturating_sub(1);
        let xp = (x + 1).min(w - 1);
        let ym = y.saturating_sub(1);
        let yp = (y + 1).min(h - 1);
        let gx = (smoothed[y * w + xp] as f64 - smoothed[y * w + xm] as f64) * 0.5;
        let gy = (smoothed[yp * w + x] as f64 - smoothed[ym * w + x] as f64) * 0.5;
        (gy, gx)
    };

    let mut out = EdgeProbMap::zeros(h, w);
    for y in 0..h {
        for x in 0..w {
            let v = prob.at(y, x);
            if v <= 0.0 {
                continue;
            }
            let (gy, gx) = grad(y, x);
            let mag = (gx * gx + gy * gy).sqrt();
            if mag < 1e-12 {
                out.set(y, x, v);
                continue;
            }
            let (uy, ux) = (gy / mag, gx / mag);
            let ahead = sample_bilinear_clamped(prob, y as f64 + uy, x as f64 + ux);
            let behind = sample_bilinear_clamped(prob, y as f64 - uy, x as f64 - ux);
            if v as f64 >= ahead && v as f64 >= behind {
                out.set(y, x, v);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_map_stays_zero() {
        let m = EdgeProbMap::zeros(8, 8);
        assert_eq!(nms_thin(&m).data(), m.data());
    }

    #[test]
    fn thin_vertical_line_is_unchanged() {
        let mut m = EdgeProbMap::zeros(9, 9);
        for y in 0..9 {
            m.set(y, 4, 0.9);
        }
        assert_eq!(nms_thin(&m).data(), m.data());
    }

    #[test]
    fn ramp_band_keeps_only_the_peak_column() {
        // Columns (3, 4, 5) carry (0.5, 0.9, 0.5); only the 0.9 ridge stays.
        let mut m = EdgeProbMap::zeros(9, 9);
        for y in 0..9 {
            m.set(y, 3, 0.5);
            m.set(y, 4, 0.9);
            m.set(y, 5, 0.5);
        }
        let thin = nms_thin(&m);
        for y in 0..9 {
            assert_eq!(thin.at(y, 3), 0.0, "left shoulder suppressed");
            assert_eq!(thin.at(y, 4), 0.9, "peak kept");
            assert_eq!(thin.at(y, 5), 0.0, "right shoulder suppressed");
        }
    }

    #[test]
    fn constant_map_is_a_fixed_point() {
        let mut m = EdgeProbMap::zeros(6, 6);
        for v in m.data_mut() {
            *v = 0.4;
        }
        assert_eq!(nms_thin(&m).data(), m.data());
    }

    #[test]
    fn horizontal_band_thins_too() {
        let mut m = EdgeProbMap::zeros(9, 9);
        for x in 0..9 {
            m.set(3, x, 0.4);
            m.set(4, x, 0.8);
            m.set(5, x, 0.4);
        }
        let thin = nms_thin(&m);
        for x in 0..9 {
            assert_eq!(thin.at(4, x), 0.8);
            assert_eq!(thin.at(3, x), 0.0);
            assert_eq!(thin.at(5, x), 0.0);
        }
    }
}
