//! Classification metrics: rank-statistic AUC with half-credit ties, ROC
//! points at every distinct score, and thresholded confusion metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    pub threshold: f64,
}

/// Metrics for one model on one evaluation set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Absent when the labels are single-class; `auc_note` says why.
    pub auc: Option<f64>,
    pub auc_note: Option<String>,
    pub f1: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub confusion: ConfusionCounts,
    pub roc: Vec<RocPoint>,
    pub threshold: f64,
}

/// AUC by the rank statistic: average ranks under ties, so a tied
/// positive/negative pair contributes exactly 0.5. Returns `None` when only
/// one class is present.
pub fn auc_rank(labels: &[u8], scores: &[f64]) -> Option<f64> {
    let n = labels.len();
    let pos = labels.iter().filter(|&&y| y == 1).count();
    let neg = n - pos;
    if pos == 0 || neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));

    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // 1-based average rank over the tie block [i, j].
        let avg_rank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            if labels[idx] == 1 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j + 1;
    }
    let p = pos as f64;
    Some((rank_sum_pos - p * (p + 1.0) / 2.0) / (p * neg as f64))
}

/// ROC points swept over every distinct score, descending, prefixed with
/// the (0, 0) corner at threshold infinity. `fpr` is non-decreasing.
pub fn roc_points(labels: &[u8], scores: &[f64]) -> Vec<RocPoint> {
    let pos = labels.iter().filter(|&&y| y == 1).count();
    let neg = labels.len() - pos;
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite scores"));

    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: if neg == 0 { 0.0 } else { fp as f64 / neg as f64 },
            tpr: if pos == 0 { 0.0 } else { tp as f64 / pos as f64 },
            threshold: s,
        });
    }
    points
}

/// Scores against labels at a decision threshold (score >= threshold reads
/// positive). Sensitivity/specificity/F1 degenerate denominators yield 0.
pub fn evaluate_scores(labels: &[u8], scores: &[f64], threshold: f64) -> Result<EvalReport> {
    if labels.len() != scores.len() {
        return Err(Error::shape(format!(
            "{} labels vs {} scores",
            labels.len(),
            scores.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::input("cannot evaluate an empty set"));
    }
    if !scores.iter().all(|s| s.is_finite()) {
        return Err(Error::input("scores contain non-finite values"));
    }

    let mut c = ConfusionCounts {
        true_pos: 0,
        false_pos: 0,
        true_neg: 0,
        false_neg: 0,
    };
    for (&y, &s) in labels.iter().zip(scores) {
        let predicted_pos = s >= threshold;
        match (y, predicted_pos) {
            (1, true) => c.true_pos += 1,
            (1, false) => c.false_neg += 1,
            (0, true) => c.false_pos += 1,
            (0, false) => c.true_neg += 1,
            _ => return Err(Error::data(format!("label {y} is not binary"))),
        }
    }

    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let auc = auc_rank(labels, scores);
    let auc_note = if auc.is_none() {
        Some("AUC undefined: evaluation labels are single-class".to_string())
    } else {
        None
    };

    Ok(EvalReport {
        auc,
        auc_note,
        f1: ratio(2 * c.true_pos, 2 * c.true_pos + c.false_pos + c.false_neg),
        sensitivity: ratio(c.true_pos, c.true_pos + c.false_neg),
        specificity: ratio(c.true_neg, c.true_neg + c.false_pos),
        confusion: c,
        roc: roc_points(labels, scores),
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::SeededRng;

    /// Brute-force pairwise oracle: fraction of positive/negative pairs
    /// ranked correctly, ties worth 0.5.
    fn auc_pairwise(labels: &[u8], scores: &[f64]) -> Option<f64> {
        let mut wins = 0.0;
        let mut total = 0.0;
        for (i, &yi) in labels.iter().enumerate() {
            for (j, &yj) in labels.iter().enumerate() {
                if yi == 1 && yj == 0 {
                    total += 1.0;
                    if scores[i] > scores[j] {
                        wins += 1.0;
                    } else if scores[i] == scores[j] {
                        wins += 0.5;
                    }
                }
            }
        }
        if total == 0.0 {
            None
        } else {
            Some(wins / total)
        }
    }

    #[test]
    fn fixed_example_is_three_quarters() {
        let labels = [0u8, 0, 1, 1];
        let scores = [0.1, 0.4, 0.35, 0.8];
        assert_eq!(auc_rank(&labels, &scores), Some(0.75));
        assert_eq!(auc_pairwise(&labels, &scores), Some(0.75));
    }

    #[test]
    fn rank_equals_pairwise_exactly_on_random_sets() {
        let mut rng = SeededRng::new(3);
        for trial in 0..100 {
            let n = 2 + rng.below(199);
            let labels: Vec<u8> = (0..n).map(|_| u8::from(rng.next_f64() < 0.4)).collect();
            // Coarse grid forces plenty of ties.
            let scores: Vec<f64> = (0..n).map(|_| (rng.next_f64() * 8.0).floor() / 8.0).collect();
            let a = auc_rank(&labels, &scores);
            let b = auc_pairwise(&labels, &scores);
            assert_eq!(a, b, "trial {trial}, n {n}");
        }
    }

    #[test]
    fn perfect_separation_is_auc_one_with_perfect_class_metrics() {
        let labels = [0u8, 0, 1, 1];
        let scores = [0.1, 0.2, 0.8, 0.9];
        let report = evaluate_scores(&labels, &scores, 0.5).unwrap();
        assert_eq!(report.auc, Some(1.0));
        assert_eq!(report.sensitivity, 1.0);
        assert_eq!(report.specificity, 1.0);
        assert_eq!(report.f1, 1.0);
    }

    #[test]
    fn threshold_tie_counts_as_positive() {
        let labels = [0u8, 0, 1, 1];
        let scores = [0.5, 0.5, 0.5, 0.5];
        let report = evaluate_scores(&labels, &scores, 0.5).unwrap();
        assert_eq!(report.sensitivity, 1.0);
        assert_eq!(report.specificity, 0.0);
        assert_eq!(report.auc, Some(0.5));
    }

    #[test]
    fn single_class_reports_absent_auc_with_reason() {
        let labels = [1u8, 1, 1];
        let scores = [0.2, 0.6, 0.9];
        let report = evaluate_scores(&labels, &scores, 0.5).unwrap();
        assert!(report.auc.is_none());
        assert!(report.auc_note.is_some());
        // Class metrics are still computed: two of three scores clear 0.5.
        assert!((report.sensitivity - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(report.specificity, 0.0);
        assert_eq!(report.confusion.total(), 3);
    }

    #[test]
    fn confusion_counts_sum_to_sample_count() {
        let mut rng = SeededRng::new(8);
        let n = 57;
        let labels: Vec<u8> = (0..n).map(|_| u8::from(rng.next_f64() < 0.5)).collect();
        let scores: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let report = evaluate_scores(&labels, &scores, 0.5).unwrap();
        assert_eq!(report.confusion.total(), n);
    }

    #[test]
    fn roc_is_monotone_in_fpr_and_spans_the_square() {
        let mut rng = SeededRng::new(9);
        let n = 40;
        let labels: Vec<u8> = (0..n).map(|_| u8::from(rng.next_f64() < 0.5)).collect();
        let scores: Vec<f64> = (0..n).map(|_| (rng.next_f64() * 4.0).floor() / 4.0).collect();
        let pts = roc_points(&labels, &scores);
        assert_eq!((pts[0].fpr, pts[0].tpr), (0.0, 0.0));
        let last = pts.last().unwrap();
        assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        for w in pts.windows(2) {
            assert!(w[1].fpr >= w[0].fpr);
            assert!(w[1].tpr >= w[0].tpr);
        }
    }
}
