//! ODS / OIS / AP from sweep counts.
//!
//! ODS maximizes F over one threshold shared by the whole dataset (counts
//! aggregated first). OIS picks each image's own best threshold (ties go to
//! the higher threshold, favoring fewer predictions), sums the chosen
//! counts and recomputes F. AP is the trapezoidal area under the dataset
//! precision-recall curve over recall, anchored at recall 0 with the
//! precision of the lowest-recall point.

use crate::matching::MatchCounts;
use crate::sweep::SweepResult;

#[derive(Debug, Clone, PartialEq)]
pub struct PRPoint {
    pub threshold: f32,
    pub tp: u64,
    pub fp: u64,
    pub false_neg: u64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

#[derive(Debug, Clone)]
pub struct PerImageBest {
    pub image: usize,
    pub threshold: f32,
    pub f_measure: f64,
}

#[derive(Debug, Clone)]
pub struct EvalSummary {
    pub ods_f: f64,
    pub ods_threshold: f32,
    pub ois_f: f64,
    pub ap: f64,
    pub pr: Vec<PRPoint>,
    pub per_image_best: Vec<PerImageBest>,
}

pub fn precision(c: &MatchCounts) -> f64 {
    if c.tp + c.fp == 0 {
        1.0
    } else {
        c.tp as f64 / (c.tp + c.fp) as f64
    }
}

pub fn recall(c: &MatchCounts) -> f64 {
    if c.tp + c.false_neg == 0 {
        1.0
    } else {
        c.tp as f64 / (c.tp + c.false_neg) as f64
    }
}

pub fn f_measure(c: &MatchCounts) -> f64 {
    let (p, r) = (precision(c), recall(c));
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn summarize(sweep: &SweepResult) -> EvalSummary {
    let t_count = sweep.thresholds.len();

    // Dataset-aggregated counts per threshold.
    let mut agg = vec![MatchCounts::default(); t_count];
    for image in &sweep.per_image {
        for (slot, c) in agg.iter_mut().zip(image) {
            slot.add(c);
        }
    }
    let pr: Vec<PRPoint> = agg
        .iter()
        .zip(&sweep.thresholds)
        .map(|(c, &t)| PRPoint {
            threshold: t,
            tp: c.tp,
            fp: c.fp,
            false_neg: c.false_neg,
            precision: precision(c),
            recall: recall(c),
            f_measure: f_measure(c),
        })
        .collect();

    // ODS: best shared threshold; first index wins ties.
    let (ods_idx, _) = pr
        .iter()
        .enumerate()
        .fold((0usize, -1.0f64), |(bi, bf), (i, p)| {
            if p.f_measure > bf {
                (i, p.f_measure)
            } else {
                (bi, bf)
            }
        });
    let ods_f = pr[ods_idx].f_measure;
    let ods_threshold = pr[ods_idx].threshold;

    // OIS: per-image optimum, counts summed, F recomputed.
    let mut ois_counts = MatchCounts::default();
    let mut per_image_best = Vec::with_capacity(sweep.per_image.len());
    for (img, counts) in sweep.per_image.iter().enumerate() {
        let mut best_i = 0usize;
        let mut best_f = -1.0f64;
        for (i, c) in counts.iter().enumerate() {
            let f = f_measure(c);
            if f >= best_f {
                // >= : later (higher) thresholds win ties.
                best_f = f;
                best_i = i;
            }
        }
        ois_counts.add(&counts[best_i]);
        per_image_best.push(PerImageBest {
            image: img,
            threshold: sweep.thresholds[best_i],
            f_measure: best_f,
        });
    }
    let ois_f = f_measure(&ois_counts);

    // AP: trapezoid over the PR curve sorted by recall, anchored at R = 0.
    let mut curve: Vec<(f64, f64)> = pr.iter().map(|p| (p.recall, p.precision)).collect();
    curve.sort_by(|a, b| a.partial_cmp(b).expect("finite PR values"));
    let mut ap = 0.0f64;
    if let Some(&(r0, p0)) = curve.first() {
        ap += r0 * p0; // anchor: constant precision from recall 0 to r0
        for w in curve.windows(2) {
            let (r1, p1) = w[0];
            let (r2, p2) = w[1];
            ap += (r2 - r1) * 0.5 * (p1 + p2);
        }
    }

    EvalSummary {
        ods_f,
        ods_threshold,
        ois_f,
        ap,
        pr,
        per_image_best,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pr_edge_cases() {
        let empty = MatchCounts::default();
        assert_eq!(precision(&empty), 1.0);
        assert_eq!(recall(&empty), 1.0);
        assert_eq!(f_measure(&empty), 1.0);

        let all_wrong = MatchCounts {
            tp: 0,
            fp: 5,
            false_neg: 3,
        };
        assert_eq!(precision(&all_wrong), 0.0);
        assert_eq!(recall(&all_wrong), 0.0);
        assert_eq!(f_measure(&all_wrong), 0.0);
    }

    #[test]
    fn single_image_ois_equals_ods() {
        let sweep = SweepResult {
            thresholds: vec![0.25, 0.5, 0.75],
            per_image: vec![vec![
                MatchCounts { tp: 8, fp: 6, false_neg: 2 },
                MatchCounts { tp: 7, fp: 1, false_neg: 3 },
                MatchCounts { tp: 3, fp: 0, false_neg: 7 },
            ]],
        };
        let s = summarize(&sweep);
        assert!((s.ois_f - s.ods_f).abs() < 1e-12);
        assert_eq!(s.ods_threshold, 0.5);
    }

    #[test]
    fn conflicting_optima_make_ois_beat_ods() {
        // Image A peaks at t=0.25, image B at t=0.75; enumerating all shared
        // thresholds confirms ODS stays below the per-image mix.
        let a = vec![
            MatchCounts { tp: 9, fp: 1, false_neg: 1 },
            MatchCounts { tp: 5, fp: 5, false_neg: 5 },
            MatchCounts { tp: 1, fp: 0, false_neg: 9 },
        ];
        let b = vec![
            MatchCounts { tp: 1, fp: 9, false_neg: 9 },
            MatchCounts { tp: 5, fp: 5, false_neg: 5 },
            MatchCounts { tp: 9, fp: 1, false_neg: 1 },
        ];
        let sweep = SweepResult {
            thresholds: vec![0.25, 0.5, 0.75],
            per_image: vec![a.clone(), b.clone()],
        };
        let s = summarize(&sweep);
        for i in 0..3 {
            let mut agg = a[i];
            agg.add(&b[i]);
            assert!(s.ods_f >= f_measure(&agg) - 1e-12);
        }
        assert!(s.ois_f > s.ods_f);
        assert_eq!(s.per_image_best[0].threshold, 0.25);
        assert_eq!(s.per_image_best[1].threshold, 0.75);
    }

    #[test]
    fn perfect_predictions_score_one() {
        let perfect = MatchCounts { tp: 50, fp: 0, false_neg: 0 };
        let sweep = SweepResult {
            thresholds: vec![0.25, 0.5, 0.75],
            per_image: vec![vec![perfect; 3], vec![perfect; 3]],
        };
        let s = summarize(&sweep);
        assert_eq!(s.ods_f, 1.0);
        assert_eq!(s.ois_f, 1.0);
        assert!(s.ap >= 0.99);
    }
}
