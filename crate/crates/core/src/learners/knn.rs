use serde::{Deserialize, Serialize};

/// Stores the (already standardized) training set verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
}

impl KnnModel {
    /// Fraction of positive labels among the `k` nearest stored points by
    /// Euclidean distance. Equal distances keep training-set order.
    pub fn score(&self, x: &[f64]) -> f64 {
        let k = self.k.min(self.rows.len());
        if k == 0 {
            return 0.0;
        }
        let mut dist: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                (
                    r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(),
                    i,
                )
            })
            .collect();
        // stable, so ties stay in training order
        dist.sort_by(|a, b| a.0.total_cmp(&b.0));
        dist[..k].iter().filter(|&&(_, i)| self.labels[i]).count() as f64 / k as f64
    }
}
