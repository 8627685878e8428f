use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::Label;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldStrategy {
    Shuffled,
    #[default]
    Stratified,
    IdentityGrouped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    /// Fold index of every clip, aligned with the input order.
    pub assignments: Vec<usize>,
    pub seed: u64,
    pub strategy: FoldStrategy,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Deals `order` round-robin into `k` folds, continuing from `offset`.
fn deal(order: &[usize], k: usize, offset: usize, assignments: &mut [usize]) {
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = (offset + pos) % k;
    }
}

/// Builds a deterministic fold plan.
///
/// * `Shuffled`: a seeded permutation dealt round-robin.
/// * `Stratified`: each class shuffled separately, then dealt round-robin
///   (negatives first, positives continuing the deal), so every fold's size
///   and per-class count are within one of each other.
/// * `IdentityGrouped`: identities are shuffled, ordered by group size
///   (largest first), and each is placed whole into the currently smallest
///   fold.
pub fn make_folds(
    clip_ids: &[String],
    labels: &[Label],
    identities: &[String],
    k: usize,
    seed: u64,
    strategy: FoldStrategy,
) -> Result<FoldPlan> {
    let n = clip_ids.len();
    if labels.len() != n || (strategy == FoldStrategy::IdentityGrouped && identities.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if labels.len() != n {
                labels.len()
            } else {
                identities.len()
            },
        });
    }
    if k == 0 {
        return Err(Error::InvalidConfig(
            "number of folds must be positive".into(),
        ));
    }
    let mut r = rng::seeded(seed);
    let mut assignments = vec![0; n];

    match strategy {
        FoldStrategy::Shuffled => {
            if k > n {
                return Err(Error::TooFewSamples {
                    needed: k,
                    available: n,
                });
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut r);
            deal(&order, k, 0, &mut assignments);
        }
        FoldStrategy::Stratified => {
            if k > n {
                return Err(Error::TooFewSamples {
                    needed: k,
                    available: n,
                });
            }
            let mut negatives: Vec<usize> =
                (0..n).filter(|&i| labels[i] == Label::Truthful).collect();
            let mut positives: Vec<usize> =
                (0..n).filter(|&i| labels[i] == Label::Deceptive).collect();
            negatives.shuffle(&mut r);
            positives.shuffle(&mut r);
            deal(&negatives, k, 0, &mut assignments);
            deal(&positives, k, negatives.len(), &mut assignments);
        }
        FoldStrategy::IdentityGrouped => {
            let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for (i, id) in identities.iter().enumerate() {
                groups.entry(id.as_str()).or_default().push(i);
            }
            if k > groups.len() {
                return Err(Error::TooFewSamples {
                    needed: k,
                    available: groups.len(),
                });
            }
            let mut groups: Vec<Vec<usize>> = groups.into_values().collect();
            groups.shuffle(&mut r);
            groups.sort_by_key(|g| std::cmp::Reverse(g.len()));
            let mut sizes = vec![0usize; k];
            for group in groups {
                let fold = (0..k).min_by_key(|&f| (sizes[f], f)).expect("k > 0");
                sizes[fold] += group.len();
                for i in group {
                    assignments[i] = fold;
                }
            }
        }
    }

    Ok(FoldPlan {
        k,
        assignments,
        seed,
        strategy,
    })
}
