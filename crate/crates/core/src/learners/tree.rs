//! CART classification trees with Gini impurity.
//!
//! Candidate thresholds sit halfway between consecutive distinct feature
//! values. Among equally good splits the lowest feature index wins, then the
//! lowest threshold. A node is split whenever it is impure, above the depth
//! limit, and has at least one non-constant candidate feature; a split that
//! does not lower impurity is still taken (needed for XOR-like data).

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        /// Fraction of (weighted) training samples at this leaf that are positive.
        positive_fraction: f64,
        samples: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    /// Positive-class fraction of the leaf `x` falls into. Samples with
    /// `x[feature] <= threshold` go left.
    pub fn score(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf {
                    positive_fraction, ..
                } => return positive_fraction,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    /// Structural check for trees read from disk: non-empty, features in
    /// range, and every child stored after its parent (so scoring ends).
    pub fn is_well_formed(&self, n_features: usize) -> bool {
        !self.nodes.is_empty()
            && self.nodes.iter().enumerate().all(|(i, node)| match *node {
                Node::Leaf {
                    positive_fraction, ..
                } => (0.0..=1.0).contains(&positive_fraction),
                Node::Split {
                    feature,
                    left,
                    right,
                    ..
                } => {
                    feature < n_features
                        && left > i
                        && right > i
                        && left < self.nodes.len()
                        && right < self.nodes.len()
                }
            })
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

pub struct TreeOptions {
    pub max_depth: usize,
    /// Features sampled per node; `None` means all of them.
    pub max_features: Option<usize>,
}

/// Grows a tree on `samples`, a list of row indices that may repeat
/// (bootstrap draws).
pub fn grow<R: Rng>(
    rows: &[Vec<f64>],
    labels: &[bool],
    samples: &[usize],
    opts: &TreeOptions,
    rng: &mut R,
) -> DecisionTree {
    let d = rows.first().map_or(0, Vec::len);
    let mut builder = Builder {
        rows,
        labels,
        d,
        opts,
        nodes: Vec::new(),
        features: (0..d).collect(),
    };
    builder.build(samples.to_vec(), 0, rng);
    DecisionTree {
        nodes: builder.nodes,
    }
}

struct Builder<'a> {
    rows: &'a [Vec<f64>],
    labels: &'a [bool],
    d: usize,
    opts: &'a TreeOptions,
    nodes: Vec<Node>,
    features: Vec<usize>,
}

#[inline]
fn gini(pos: f64, total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let p = pos / total;
    2.0 * p * (1.0 - p)
}

impl Builder<'_> {
    fn build<R: Rng>(&mut self, samples: Vec<usize>, depth: usize, rng: &mut R) -> usize {
        let id = self.nodes.len();
        let total = samples.len();
        let pos = samples.iter().filter(|&&i| self.labels[i]).count();
        let leaf = Node::Leaf {
            positive_fraction: if total == 0 {
                0.0
            } else {
                pos as f64 / total as f64
            },
            samples: total,
        };
        self.nodes.push(leaf.clone());
        if pos == 0 || pos == total || depth >= self.opts.max_depth {
            return id;
        }
        let Some((feature, threshold)) = self.best_split(&samples, pos, rng) else {
            return id;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = samples
            .into_iter()
            .partition(|&i| self.rows[i][feature] <= threshold);
        let left_id = self.build(left, depth + 1, rng);
        let right_id = self.build(right, depth + 1, rng);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left: left_id,
            right: right_id,
        };
        id
    }

    fn candidates<R: Rng>(&mut self, rng: &mut R) -> Vec<usize> {
        match self.opts.max_features {
            Some(m) if m < self.d => {
                // partial Fisher-Yates over a persistent index buffer
                for i in 0..m {
                    let j = rng.random_range(i..self.d);
                    self.features.swap(i, j);
                }
                let mut picked = self.features[..m].to_vec();
                picked.sort_unstable();
                picked
            }
            _ => (0..self.d).collect(),
        }
    }

    fn best_split<R: Rng>(
        &mut self,
        samples: &[usize],
        pos: usize,
        rng: &mut R,
    ) -> Option<(usize, f64)> {
        let n = samples.len() as f64;
        let pos_total = pos as f64;
        let mut best: Option<(f64, usize, f64)> = None;
        let mut sorted = samples.to_vec();
        for f in self.candidates(rng) {
            sorted.sort_by(|&a, &b| self.rows[a][f].total_cmp(&self.rows[b][f]));
            let mut left_pos = 0.0;
            for k in 0..sorted.len() - 1 {
                if self.labels[sorted[k]] {
                    left_pos += 1.0;
                }
                let (lo, hi) = (self.rows[sorted[k]][f], self.rows[sorted[k + 1]][f]);
                if lo == hi {
                    continue;
                }
                let nl = (k + 1) as f64;
                let nr = n - nl;
                let impurity = (nl * gini(left_pos, nl) + nr * gini(pos_total - left_pos, nr)) / n;
                if best.is_none_or(|(b, _, _)| impurity < b - 1e-12) {
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi || !threshold.is_finite() {
                        threshold = lo;
                    }
                    best = Some((impurity, f, threshold));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}
