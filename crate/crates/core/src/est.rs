//! Emotion state transformation (EST) features.
//!
//! An EST vector is the normalized 7x7 transition count matrix of a revised
//! track, flattened row-major: feature `7 * from + to`. A run of identical
//! states contributes a single self-transition no matter how long it lasts.

use serde::{Deserialize, Serialize};

use crate::emotion::{EmotionState, RevisedTrack};

/// Length of an EST vector (7 x 7).
pub const EST_DIM: usize = EmotionState::COUNT * EmotionState::COUNT;

#[inline]
pub fn feature_index(from: EmotionState, to: EmotionState) -> usize {
    EmotionState::COUNT * from.index() + to.index()
}

pub fn feature_pair(index: usize) -> Option<(EmotionState, EmotionState)> {
    if index >= EST_DIM {
        return None;
    }
    Some((
        EmotionState::from_index(index / EmotionState::COUNT)?,
        EmotionState::from_index(index % EmotionState::COUNT)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TransitionMatrix {
    pub counts: [[u64; EmotionState::COUNT]; EmotionState::COUNT],
    pub total: u64,
}

impl TransitionMatrix {
    fn bump(&mut self, from: EmotionState, to: EmotionState) {
        self.counts[from.index()][to.index()] += 1;
        self.total += 1;
    }

    pub fn get(&self, from: EmotionState, to: EmotionState) -> u64 {
        self.counts[from.index()][to.index()]
    }

    /// Row-major flatten of the counts.
    pub fn flatten(&self) -> Vec<u64> {
        self.counts.iter().flatten().copied().collect()
    }

    pub fn add(&mut self, other: &TransitionMatrix) {
        for (row, other_row) in self.counts.iter_mut().zip(other.counts.iter()) {
            for (c, o) in row.iter_mut().zip(other_row.iter()) {
                *c += o;
            }
        }
        self.total += other.total;
    }

    pub fn normalized(&self) -> EstVector {
        if self.total == 0 {
            return EstVector::degenerate();
        }
        let t = self.total as f64;
        EstVector {
            values: self.flatten().into_iter().map(|c| c as f64 / t).collect(),
            degenerate: false,
        }
    }
}

/// Counts transitions the way the EST feature does.
///
/// The first pair is always counted. Every later pair is counted when the
/// state changes, or when it is the first repeat of a new run.
pub fn transition_counts(states: &[EmotionState]) -> TransitionMatrix {
    let mut matrix = TransitionMatrix::default();
    for k in 0..states.len().saturating_sub(1) {
        let (cur, next) = (states[k], states[k + 1]);
        if cur != next || k == 0 || cur != states[k - 1] {
            matrix.bump(cur, next);
        }
    }
    matrix
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstVector {
    pub values: Vec<f64>,
    /// Set when the track had no adjacent pair; `values` is then all zero.
    pub degenerate: bool,
}

impl EstVector {
    pub fn degenerate() -> Self {
        EstVector {
            values: vec![0.0; EST_DIM],
            degenerate: true,
        }
    }

    pub fn get(&self, from: EmotionState, to: EmotionState) -> f64 {
        self.values[feature_index(from, to)]
    }
}

pub fn est_feature(revised: &RevisedTrack) -> EstVector {
    est_from_states(&revised.states)
}

pub fn est_from_states(states: &[EmotionState]) -> EstVector {
    transition_counts(states).normalized()
}

/// Fraction of positions holding each state. An empty input yields zeros.
pub fn emotion_distribution(states: &[EmotionState]) -> [f64; EmotionState::COUNT] {
    let mut dist = [0.0; EmotionState::COUNT];
    if states.is_empty() {
        return dist;
    }
    for s in states {
        dist[s.index()] += 1.0;
    }
    let n = states.len() as f64;
    dist.iter_mut().for_each(|d| *d /= n);
    dist
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedTransition {
    pub from: EmotionState,
    pub to: EmotionState,
    pub value: f64,
}

/// The `count` largest entries in descending order; equal values keep
/// ascending feature index order.
pub fn top_transitions(est: &EstVector, count: usize) -> Vec<RankedTransition> {
    let mut order: Vec<usize> = (0..est.values.len().min(EST_DIM)).collect();
    order.sort_by(|&a, &b| est.values[b].total_cmp(&est.values[a]).then(a.cmp(&b)));
    order
        .into_iter()
        .take(count)
        .map(|i| {
            let (from, to) = feature_pair(i).expect("index below EST_DIM");
            RankedTransition {
                from,
                to,
                value: est.values[i],
            }
        })
        .collect()
}
