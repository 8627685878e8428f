use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::Label;

/// Binary confusion counts with "deceptive" as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn from_predictions(predicted: &[Label], actual: &[Label]) -> Self {
        let mut c = Confusion::default();
        for (&p, &a) in predicted.iter().zip(actual) {
            match (p, a) {
                (Label::Deceptive, Label::Deceptive) => c.tp += 1,
                (Label::Deceptive, Label::Truthful) => c.fp += 1,
                (Label::Truthful, Label::Deceptive) => c.fn_ += 1,
                (Label::Truthful, Label::Truthful) => c.tn += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn accuracy(&self) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    pub fn add(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.tn += other.tn;
    }
}

/// Area under the ROC curve via the rank-sum statistic with average ranks
/// for tied scores, i.e. P(positive outscores negative) + P(tie) / 2.
pub fn roc_auc(scores: &[f64], labels: &[Label]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: scores.len(),
            found: labels.len(),
        });
    }
    let n_pos = labels.iter().filter(|&&l| l == Label::Deceptive).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClassTest);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // ranks are 1-based; doubled so tied averages stay integral
    let mut pos_rank_sum2: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]].total_cmp(&scores[order[start]]).is_eq() {
            end += 1;
        }
        let avg2 = (start + 1 + end) as u128; // 2 * mean of ranks start+1..=end
        let tied_pos = order[start..end]
            .iter()
            .filter(|&&i| labels[i] == Label::Deceptive)
            .count() as u128;
        pos_rank_sum2 += avg2 * tied_pos;
        start = end;
    }
    let (p, q) = (n_pos as u128, n_neg as u128);
    // 2U = 2R - p(p+1)
    let u2 = pos_rank_sum2 - p * (p + 1);
    Ok(u2 as f64 / (2 * p * q) as f64)
}
