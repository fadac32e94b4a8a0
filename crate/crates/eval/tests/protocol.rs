//! End-to-end protocol checks: perfect predictions score 1.0, shifted
//! predictions inside the tolerance radius cost nothing, greedy matching
//! agrees with the exhaustive reference, and OIS dominates ODS.

use bdcn_eval::matching::{greedy_tp, reference::max_matching_tp};
use bdcn_eval::{
    default_thresholds, match_edges, match_radius, nms_thin, summarize, sweep_thresholds,
    BinaryMap,
};
use bdcn_tensor::EdgeProbMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mask_from(pixels: &[(usize, usize)], h: usize, w: usize) -> BinaryMap {
    let mut data = vec![false; h * w];
    for &(y, x) in pixels {
        data[y * w + x] = true;
    }
    BinaryMap::new(h, w, data)
}

fn random_pixels(rng: &mut ChaCha8Rng, n: usize, h: usize, w: usize) -> Vec<(usize, usize)> {
    let mut seen = std::collections::BTreeSet::new();
    while seen.len() < n {
        seen.insert((rng.gen_range(0..h), rng.gen_range(0..w)));
    }
    seen.into_iter().collect()
}

#[test]
fn perfect_predictions_give_perfect_scores() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut maps = Vec::new();
    let mut gts = Vec::new();
    for _ in 0..4 {
        let px = random_pixels(&mut rng, 30, 50, 50);
        let mut m = EdgeProbMap::zeros(50, 50);
        for &(y, x) in &px {
            m.set(y, x, 1.0);
        }
        gts.push(BinaryMap::from_gt(&m));
        maps.push(nms_thin(&m));
    }
    let sweep = sweep_thresholds(&maps, &gts, &default_thresholds(), 0.0075).unwrap();
    let s = summarize(&sweep);
    assert_eq!(s.ods_f, 1.0);
    assert_eq!(s.ois_f, 1.0);
    assert!(s.ap >= 0.99, "AP {}", s.ap);
}

#[test]
fn one_pixel_shift_is_free_at_default_tolerance() {
    // 100x100: radius = 0.0075 * sqrt(2 * 100^2) ~ 1.06 px >= 1.
    assert!(match_radius(100, 100, 0.0075) > 1.0);

    // A vertical line shifted sideways by one pixel.
    let gt_px: Vec<(usize, usize)> = (5..95).map(|y| (y, 40)).collect();
    let pred_px: Vec<(usize, usize)> = gt_px.iter().map(|&(y, x)| (y, x + 1)).collect();
    let c = match_edges(
        &mask_from(&pred_px, 100, 100),
        &mask_from(&gt_px, 100, 100),
        0.0075,
    )
    .unwrap();
    assert_eq!((c.fp, c.false_neg), (0, 0));

    // A sparse scatter (pairwise separation >= 3) shifted by one pixel.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut scatter: Vec<(usize, usize)> = Vec::new();
    while scatter.len() < 60 {
        let p = (rng.gen_range(2..97), rng.gen_range(2..97));
        if scatter
            .iter()
            .all(|&(y, x)| (y as i64 - p.0 as i64).abs() + (x as i64 - p.1 as i64).abs() >= 3)
        {
            scatter.push(p);
        }
    }
    let shifted: Vec<(usize, usize)> = scatter.iter().map(|&(y, x)| (y + 1, x)).collect();
    let c = match_edges(
        &mask_from(&shifted, 100, 100),
        &mask_from(&scatter, 100, 100),
        0.0075,
    )
    .unwrap();
    assert_eq!((c.fp, c.false_neg), (0, 0));
}

/// Greedy matching vs the exhaustive maximum-cardinality reference on 200
/// random small fixtures; aggregate divergence must stay under 2% of tp.
#[test]
fn greedy_matcher_tracks_exhaustive_reference() {
    let started = std::time::Instant::now();
    let mut total_ref = 0usize;
    let mut total_div = 0usize;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
        let h = rng.gen_range(16..=32);
        let w = rng.gen_range(16..=32);
        let np = rng.gen_range(1..=20);
        let ng = rng.gen_range(1..=20);
        let pred = random_pixels(&mut rng, np.min(h * w / 2), h, w);
        let gt = random_pixels(&mut rng, ng.min(h * w / 2), h, w);
        // Tolerances spanning the range the evaluator runs at.
        let radius = match_radius(h, w, rng.gen_range(0.0075..0.03));
        let greedy = greedy_tp(&pred, &gt, w, radius);
        let exact = max_matching_tp(&pred, &gt, radius);
        assert!(greedy <= exact);
        if greedy != exact {
            eprintln!(
                "divergence at seed {seed}: greedy {greedy} vs exhaustive {exact} \
                 ({np} pred / {ng} gt, radius {radius:.2})"
            );
        }
        total_ref += exact;
        total_div += exact - greedy;
    }
    assert!(
        (total_div as f64) <= 0.02 * total_ref as f64,
        "aggregate divergence {total_div} of {total_ref} exceeds 2%"
    );
    assert!(started.elapsed().as_secs() < 60);
}

#[test]
fn per_image_counts_are_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..30 {
        let n_pred = rng.gen_range(0..40);
        let n_gt = rng.gen_range(1..40);
        let pred = random_pixels(&mut rng, n_pred, 40, 40);
        let gt = random_pixels(&mut rng, n_gt, 40, 40);
        let c = match_edges(&mask_from(&pred, 40, 40), &mask_from(&gt, 40, 40), 0.05).unwrap();
        assert_eq!(c.tp + c.fp, pred.len() as u64);
        assert_eq!(c.tp + c.false_neg, gt.len() as u64);
        assert!(c.tp <= pred.len().min(gt.len()) as u64);

        let sw = match_edges(&mask_from(&gt, 40, 40), &mask_from(&pred, 40, 40), 0.05).unwrap();
        assert_eq!(c.tp, sw.tp, "tp must be symmetric under swap");
        assert_eq!(c.fp, sw.false_neg);
        assert_eq!(c.false_neg, sw.fp);
    }
}

#[test]
fn ois_dominates_ods_on_random_fixtures() {
    for seed in 0..25u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(400 + seed);
        let n_images = rng.gen_range(2..6);
        let mut maps = Vec::new();
        let mut gts = Vec::new();
        for _ in 0..n_images {
            let n_gt = rng.gen_range(5..40);
            let gt_px = random_pixels(&mut rng, n_gt, 48, 48);
            let mut gt_map = EdgeProbMap::zeros(48, 48);
            for &(y, x) in &gt_px {
                gt_map.set(y, x, 1.0);
            }
            gts.push(BinaryMap::from_gt(&gt_map));
            // Noisy prediction: true pixels at high-ish probability plus clutter.
            let mut m = EdgeProbMap::zeros(48, 48);
            for &(y, x) in &gt_px {
                if rng.gen::<f32>() < 0.85 {
                    m.set(y, x, rng.gen_range(0.4..1.0));
                }
            }
            for _ in 0..rng.gen_range(5..50) {
                let (y, x) = (rng.gen_range(0..48), rng.gen_range(0..48));
                let v = m.at(y, x).max(rng.gen_range(0.01..0.7));
                m.set(y, x, v);
            }
            maps.push(m);
        }
        let sweep = sweep_thresholds(&maps, &gts, &default_thresholds(), 0.0075).unwrap();
        let s = summarize(&sweep);
        assert!(
            s.ois_f >= s.ods_f - 1e-12,
            "seed {seed}: OIS {} < ODS {}",
            s.ois_f,
            s.ods_f
        );
    }
}

#[test]
fn single_image_dataset_has_equal_ods_and_ois() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let gt_px = random_pixels(&mut rng, 25, 40, 40);
    let mut gt_map = EdgeProbMap::zeros(40, 40);
    for &(y, x) in &gt_px {
        gt_map.set(y, x, 1.0);
    }
    let mut m = EdgeProbMap::zeros(40, 40);
    for &(y, x) in &gt_px {
        m.set(y, x, rng.gen_range(0.3..1.0));
    }
    let sweep = sweep_thresholds(
        &[m],
        &[BinaryMap::from_gt(&gt_map)],
        &default_thresholds(),
        0.0075,
    )
    .unwrap();
    let s = summarize(&sweep);
    assert!((s.ods_f - s.ois_f).abs() < 1e-12);
}

/// Monotone rescaling of the probabilities together with the threshold grid
/// leaves the chosen ODS operating point (and its F value) unchanged.
#[test]
fn ods_is_invariant_to_monotone_rescaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let gt_px = random_pixels(&mut rng, 30, 40, 40);
    let mut gt_map = EdgeProbMap::zeros(40, 40);
    for &(y, x) in &gt_px {
        gt_map.set(y, x, 1.0);
    }
    let gt = BinaryMap::from_gt(&gt_map);
    let mut m = EdgeProbMap::zeros(40, 40);
    for &(y, x) in &gt_px {
        m.set(y, x, rng.gen_range(0.2..1.0));
    }
    for _ in 0..60 {
        let (y, x) = (rng.gen_range(0..40), rng.gen_range(0..40));
        let v = m.at(y, x).max(rng.gen_range(0.01..0.6));
        m.set(y, x, v);
    }

    let thresholds = default_thresholds();
    let sweep = sweep_thresholds(std::slice::from_ref(&m), std::slice::from_ref(&gt), &thresholds, 0.0075).unwrap();
    let base = summarize(&sweep);

    // p -> p/2 with thresholds t -> t/2 selects the same binarizations.
    let mut half = m.clone();
    for v in half.data_mut() {
        *v *= 0.5;
    }
    let half_thresholds: Vec<f32> = thresholds.iter().map(|t| t / 2.0).collect();
    let sweep2 = sweep_thresholds(&[half], std::slice::from_ref(&gt), &half_thresholds, 0.0075).unwrap();
    let scaled = summarize(&sweep2);
    assert!((base.ods_f - scaled.ods_f).abs() < 1e-12);
}
