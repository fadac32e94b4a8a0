//! Synthetic desk-scale dataset: filled ellipses and simple polygons on a
//! smoothly shaded background, drawn at two distinct size regimes, with
//! additive noise. Ground truth is the exact one-pixel-wide rasterized
//! boundary of every visible region: a pixel is an edge when the topmost
//! shape covering it differs from a 4-neighbor's and its own id is the
//! larger one (so each edge is marked once, on the topmost side).

use bdcn_loss::ConsensusGT;
use bdcn_tensor::{EdgeProbMap, Shape4, Tensor4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DataError, Result};
use crate::sample::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeRegime {
    Small,
    Large,
}

#[derive(Debug, Clone)]
pub enum ShapeKind {
    Ellipse { cx: f64, cy: f64, rx: f64, ry: f64 },
    Polygon { pts: Vec<(f64, f64)> },
}

#[derive(Debug, Clone)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    pub regime: SizeRegime,
    color: [f32; 3],
    shade: [f32; 2],
}

impl ShapeSpec {
    /// Membership test at a pixel center.
    pub fn contains(&self, px: usize, py: usize) -> bool {
        let x = px as f64 + 0.5;
        let y = py as f64 + 0.5;
        match &self.kind {
            ShapeKind::Ellipse { cx, cy, rx, ry } => {
                let dx = (x - cx) / rx;
                let dy = (y - cy) / ry;
                dx * dx + dy * dy <= 1.0
            }
            ShapeKind::Polygon { pts } => {
                // Even-odd ray casting.
                let mut inside = false;
                let n = pts.len();
                for i in 0..n {
                    let (x1, y1) = pts[i];
                    let (x2, y2) = pts[(i + 1) % n];
                    if (y1 > y) != (y2 > y) {
                        let t = (y - y1) / (y2 - y1);
                        if x < x1 + t * (x2 - x1) {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }
}

/// One generated sample plus per-regime ground-truth splits and the shape
/// descriptors that produced it (for verification).
#[derive(Debug, Clone)]
pub struct SynthSample {
    pub sample: Sample,
    pub gt_small: EdgeProbMap,
    pub gt_large: EdgeProbMap,
    pub shapes: Vec<ShapeSpec>,
}

fn luminance(c: &[f32; 3]) -> f32 {
    0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2]
}

fn splitmix(seed: u64, i: u64) -> u64 {
    let mut z = seed.wrapping_add(i.wrapping_mul(0x9e3779b97f4a7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn random_shape(rng: &mut ChaCha8Rng, size: f64, regime: SizeRegime) -> ShapeKind {
    let radius_frac = match regime {
        SizeRegime::Small => rng.gen_range(0.055..0.11),
        SizeRegime::Large => rng.gen_range(0.2..0.33),
    };
    let r = radius_frac * size;
    let cx = rng.gen_range(r..size - r);
    let cy = rng.gen_range(r..size - r);
    if rng.gen::<bool>() {
        let squish = rng.gen_range(0.6..1.0);
        if rng.gen::<bool>() {
            ShapeKind::Ellipse { cx, cy, rx: r, ry: r * squish }
        } else {
            ShapeKind::Ellipse { cx, cy, rx: r * squish, ry: r }
        }
    } else {
        let sides = rng.gen_range(3..=5);
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        let pts = (0..sides)
            .map(|k| {
                let ang = phase + k as f64 * std::f64::consts::TAU / sides as f64;
                let rr = r * rng.gen_range(0.75..1.0);
                (cx + rr * ang.cos(), cy + rr * ang.sin())
            })
            .collect();
        ShapeKind::Polygon { pts }
    }
}

/// Pick a color whose luminance clears the background and other shapes.
fn pick_color(rng: &mut ChaCha8Rng, taken: &[f32]) -> [f32; 3] {
    let mut best: ([f32; 3], f32) = ([0.5; 3], -1.0);
    for _ in 0..60 {
        let c = [
            rng.gen_range(0.05..0.95),
            rng.gen_range(0.05..0.95),
            rng.gen_range(0.05..0.95),
        ];
        let lum = luminance(&c);
        let sep = taken
            .iter()
            .map(|&t| (t - lum).abs())
            .fold(f32::INFINITY, f32::min);
        if sep >= 0.2 {
            return c;
        }
        if sep > best.1 {
            best = (c, sep);
        }
    }
    best.0
}

pub fn synth_shapes(seed: u64, count: usize, size: usize) -> Result<Vec<SynthSample>> {
    if size < 32 {
        return Err(DataError::Config(format!("size {size} must be >= 32")));
    }
    (0..count)
        .map(|i| synth_one(splitmix(seed, i as u64), i, size))
        .collect()
}

fn synth_one(seed: u64, index: usize, size: usize) -> Result<SynthSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sz = size as f64;

    // Background gradient, then its mid luminance for color separation.
    let base: [f32; 3] = [
        rng.gen_range(0.3..0.7),
        rng.gen_range(0.3..0.7),
        rng.gen_range(0.3..0.7),
    ];
    let slope: [(f32, f32); 3] = [
        (rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2)),
        (rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2)),
        (rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2)),
    ];
    let mut taken = vec![luminance(&base)];

    // Large shapes first so small ones draw on top.
    let n_large = rng.gen_range(1..=2);
    let n_small = rng.gen_range(3..=5);
    let mut shapes = Vec::with_capacity(n_large + n_small);
    for _ in 0..n_large {
        let kind = random_shape(&mut rng, sz, SizeRegime::Large);
        let color = pick_color(&mut rng, &taken);
        taken.push(luminance(&color));
        shapes.push(ShapeSpec {
            kind,
            regime: SizeRegime::Large,
            color,
            shade: [rng.gen_range(-0.12..0.12), rng.gen_range(-0.12..0.12)],
        });
    }
    for _ in 0..n_small {
        let kind = random_shape(&mut rng, sz, SizeRegime::Small);
        let color = pick_color(&mut rng, &taken);
        taken.push(luminance(&color));
        shapes.push(ShapeSpec {
            kind,
            regime: SizeRegime::Small,
            color,
            shade: [rng.gen_range(-0.12..0.12), rng.gen_range(-0.12..0.12)],
        });
    }

    // Topmost shape id per pixel; 0 is background, shape i has id i+1.
    let mut id_map = vec![0usize; size * size];
    for y in 0..size {
        for x in 0..size {
            for (i, s) in shapes.iter().enumerate().rev() {
                if s.contains(x, y) {
                    id_map[y * size + x] = i + 1;
                    break;
                }
            }
        }
    }

    // Boundaries: topmost side of every id change.
    let mut gt = vec![0.0f32; size * size];
    let mut gt_small = vec![0.0f32; size * size];
    let mut gt_large = vec![0.0f32; size * size];
    for y in 0..size {
        for x in 0..size {
            let id = id_map[y * size + x];
            if id == 0 {
                continue;
            }
            let mut edge = false;
            if x > 0 && id_map[y * size + x - 1] < id {
                edge = true;
            }
            if !edge && x + 1 < size && id_map[y * size + x + 1] < id {
                edge = true;
            }
            if !edge && y > 0 && id_map[(y - 1) * size + x] < id {
                edge = true;
            }
            if !edge && y + 1 < size && id_map[(y + 1) * size + x] < id {
                edge = true;
            }
            if edge {
                gt[y * size + x] = 1.0;
                match shapes[id - 1].regime {
                    SizeRegime::Small => gt_small[y * size + x] = 1.0,
                    SizeRegime::Large => gt_large[y * size + x] = 1.0,
                }
            }
        }
    }

    // Render: shaded fills over the gradient background, then noise.
    let shape4 = Shape4::new(1, 3, size, size)?;
    let mut image = Tensor4::zeros(shape4);
    let plane = size * size;
    for y in 0..size {
        for x in 0..size {
            let idx = y * size + x;
            let id = id_map[idx];
            let (fx, fy) = (x as f32 / size as f32, y as f32 / size as f32);
            for c in 0..3 {
                let v = if id == 0 {
                    base[c] + slope[c].0 * fx + slope[c].1 * fy
                } else {
                    let s = &shapes[id - 1];
                    s.color[c] + s.shade[0] * fx + s.shade[1] * fy
                };
                image.data_mut()[c * plane + idx] = v.clamp(0.02, 0.98);
            }
        }
    }
    for v in image.data_mut() {
        *v = (*v + rng.gen_range(-0.02..0.02f32)).clamp(0.0, 1.0);
    }

    let gt = ConsensusGT::new(size, size, gt, 0.3)?;
    Ok(SynthSample {
        sample: Sample {
            id: format!("s{index:04}"),
            image,
            gt,
        },
        gt_small: EdgeProbMap::from_vec(size, size, gt_small)?,
        gt_large: EdgeProbMap::from_vec(size, size, gt_large)?,
        shapes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_count_gives_empty_dataset() {
        assert!(synth_shapes(1, 0, 64).unwrap().is_empty());
    }

    #[test]
    fn tiny_size_is_rejected() {
        assert!(synth_shapes(1, 1, 16).is_err());
    }

    #[test]
    fn fixed_seed_is_bitwise_reproducible() {
        let a = synth_shapes(42, 3, 64).unwrap();
        let b = synth_shapes(42, 3, 64).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.sample.image.data(), y.sample.image.data());
            assert_eq!(x.sample.gt.values(), y.sample.gt.values());
            assert_eq!(x.gt_small.data(), y.gt_small.data());
        }
    }

    #[test]
    fn regime_split_partitions_the_gt() {
        for s in synth_shapes(7, 5, 64).unwrap() {
            for i in 0..s.sample.gt.values().len() {
                let total = s.sample.gt.values()[i];
                let small = s.gt_small.data()[i];
                let large = s.gt_large.data()[i];
                assert_eq!(total, small + large, "regimes must partition the GT");
            }
            assert!(s.gt_small.data().iter().any(|&v| v > 0.0), "has small edges");
            assert!(s.gt_large.data().iter().any(|&v| v > 0.0), "has large edges");
        }
    }

    /// Every GT pixel must lie on the analytic boundary of the shape that
    /// owns it: inside the shape, with a 4-neighbor outside it.
    #[test]
    fn gt_pixels_lie_on_analytic_boundaries() {
        for s in synth_shapes(11, 4, 64).unwrap() {
            let size = s.sample.gt.width();
            for y in 0..size {
                for x in 0..size {
                    if s.sample.gt.values()[y * size + x] == 0.0 {
                        continue;
                    }
                    let on_boundary = s.shapes.iter().any(|shape| {
                        if !shape.contains(x, y) {
                            return false;
                        }
                        let mut outside = false;
                        if x > 0 && !shape.contains(x - 1, y) {
                            outside = true;
                        }
                        if x + 1 < size && !shape.contains(x + 1, y) {
                            outside = true;
                        }
                        if y > 0 && !shape.contains(x, y - 1) {
                            outside = true;
                        }
                        if y + 1 < size && !shape.contains(x, y + 1) {
                            outside = true;
                        }
                        outside
                    });
                    assert!(on_boundary, "GT pixel ({x},{y}) is not on any shape rim");
                }
            }
        }
    }
}
