//! Deterministic geometric augmentation: scale, right-angle rotation,
//! horizontal flip and random crop, with the identical transform applied to
//! image and ground truth. Images are resampled bilinearly; ground truth
//! uses nearest-neighbor so edges stay thin and the value set is preserved.

use bdcn_loss::ConsensusGT;
use bdcn_tensor::resize::{resize_bilinear_plane, resize_nearest_plane};
use bdcn_tensor::{Shape4, Tensor4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DataError, Result};
use crate::sample::Sample;

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentSpec {
    pub flip: bool,
    /// Right-angle rotations (degrees, multiples of 90; negatives allowed).
    pub rotations: Vec<i32>,
    pub scales: Vec<f32>,
    /// Crop size (h, w) applied after scaling/rotation.
    pub crop: Option<(usize, usize)>,
    pub seed: u64,
}

impl Default for AugmentSpec {
    fn default() -> Self {
        Self {
            flip: true,
            rotations: vec![0, 90, 180, 270],
            scales: vec![0.75, 1.0, 1.25],
            crop: None,
            seed: 0,
        }
    }
}

impl AugmentSpec {
    pub fn identity() -> Self {
        Self {
            flip: false,
            rotations: vec![0],
            scales: vec![1.0],
            crop: None,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.rotations.is_empty() || self.scales.is_empty() {
            return Err(DataError::Config("rotation and scale sets must be non-empty".into()));
        }
        if self.rotations.iter().any(|r| r.rem_euclid(90) != 0) {
            return Err(DataError::Config("rotations must be multiples of 90 degrees".into()));
        }
        if self.scales.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return Err(DataError::Config("scales must be positive".into()));
        }
        Ok(())
    }
}

/// Planes of one sample: image channels plus the ground-truth map.
struct Planes {
    h: usize,
    w: usize,
    channels: Vec<Vec<f32>>,
    gt: Vec<f32>,
}

fn rot90_cw(src: &[f32], h: usize, w: usize) -> Vec<f32> {
    // Output is w x h: out[y][x] = src[h-1-x][y]
    let mut out = vec![0.0f32; h * w];
    for y in 0..w {
        for x in 0..h {
            out[y * h + x] = src[(h - 1 - x) * w + y];
        }
    }
    out
}

fn flip_h(src: &[f32], h: usize, w: usize) -> Vec<f32> {
    let mut out = Vec::with_capacity(h * w);
    for y in 0..h {
        out.extend(src[y * w..(y + 1) * w].iter().rev());
    }
    out
}

pub fn augment(sample: &Sample, spec: &AugmentSpec) -> Result<Sample> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let scale = spec.scales[rng.gen_range(0..spec.scales.len())];
    let rotation = spec.rotations[rng.gen_range(0..spec.rotations.len())];
    let do_flip = spec.flip && rng.gen::<bool>();

    let ishape = sample.image.shape();
    let mut p = Planes {
        h: ishape.h,
        w: ishape.w,
        channels: (0..ishape.c).map(|c| sample.image.plane(0, c).to_vec()).collect(),
        gt: sample.gt.values().to_vec(),
    };

    if scale != 1.0 {
        let th = ((p.h as f64 * scale as f64).round() as usize).max(1);
        let tw = ((p.w as f64 * scale as f64).round() as usize).max(1);
        for ch in &mut p.channels {
            *ch = resize_bilinear_plane(ch, p.h, p.w, th, tw);
        }
        p.gt = resize_nearest_plane(&p.gt, p.h, p.w, th, tw);
        p.h = th;
        p.w = tw;
    }

    let quarter_turns = rotation.rem_euclid(360) / 90;
    for _ in 0..quarter_turns {
        for ch in &mut p.channels {
            *ch = rot90_cw(ch, p.h, p.w);
        }
        p.gt = rot90_cw(&p.gt, p.h, p.w);
        std::mem::swap(&mut p.h, &mut p.w);
    }

    if do_flip {
        for ch in &mut p.channels {
            *ch = flip_h(ch, p.h, p.w);
        }
        p.gt = flip_h(&p.gt, p.h, p.w);
    }

    if let Some((ch_, cw_)) = spec.crop {
        if ch_ > p.h || cw_ > p.w {
            return Err(DataError::Config(format!(
                "crop {}x{} exceeds image {}x{}",
                ch_, cw_, p.h, p.w
            )));
        }
        let oy = rng.gen_range(0..=(p.h - ch_));
        let ox = rng.gen_range(0..=(p.w - cw_));
        let crop_plane = |src: &[f32]| -> Vec<f32> {
            let mut out = Vec::with_capacity(ch_ * cw_);
            for y in 0..ch_ {
                let start = (oy + y) * p.w + ox;
                out.extend_from_slice(&src[start..start + cw_]);
            }
            out
        };
        for ch in &mut p.channels {
            *ch = crop_plane(ch);
        }
        p.gt = crop_plane(&p.gt);
        p.h = ch_;
        p.w = cw_;
    }

    let shape = Shape4::new(1, ishape.c, p.h, p.w)?;
    let mut image = Tensor4::zeros(shape);
    for (c, ch) in p.channels.iter().enumerate() {
        let start = c * p.h * p.w;
        image.data_mut()[start..start + p.h * p.w].copy_from_slice(ch);
    }
    // Nearest-neighbor resampling of in-range values stays in range, but
    // bilinear image values can drift a hair past [0,1]; clamp them back.
    for v in image.data_mut() {
        *v = v.clamp(0.0, 1.0);
    }
    let gt = ConsensusGT::new(p.h, p.w, p.gt, sample.gt.gamma())?;
    Ok(Sample {
        id: sample.id.clone(),
        image,
        gt,
    })
}
