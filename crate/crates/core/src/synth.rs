//! Seeded synthetic corpora from class-conditional emotion Markov chains.
//!
//! The default chains take the published top-5 EST rates of each class,
//! place them on their transitions and spread the rest of each row
//! uniformly. They are a plausible starting point for exercising the
//! pipeline, not a model of real subjects.

use std::collections::BTreeMap;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, CorpusManifest, ManifestEntry};
use crate::emotion::{EmotionState, EmotionTrack, AUDIO_EXPANSION_FACTOR};
use crate::error::{Error, Result};
use crate::fusion::Label;
use crate::rng::{self, derive_seed};

pub type Chain = [[f64; EmotionState::COUNT]; EmotionState::COUNT];
pub type Distribution7 = [f64; EmotionState::COUNT];

const ROW_TOLERANCE: f64 = 1e-9;

use EmotionState::*;

const DECEPTIVE_SEEDS: [(EmotionState, EmotionState, f64); 5] = [
    (Sad, Fear, 0.43),
    (Neutral, Sad, 0.18),
    (Happy, Neutral, 0.10),
    (Fear, Angry, 0.08),
    (Neutral, Neutral, 0.05),
];

const TRUTHFUL_SEEDS: [(EmotionState, EmotionState, f64); 5] = [
    (Fear, Angry, 0.36),
    (Neutral, Neutral, 0.15),
    (Neutral, Happy, 0.13),
    (Fear, Neutral, 0.09),
    (Sad, Angry, 0.08),
];

/// Builds a row-stochastic chain: listed masses go on their cells, the rest
/// of each row is split evenly over its remaining cells, and untouched rows
/// are uniform.
pub fn chain_from_seeds(seeds: &[(EmotionState, EmotionState, f64)]) -> Chain {
    const N: usize = EmotionState::COUNT;
    let mut chain = [[0.0; N]; N];
    for (i, row) in chain.iter_mut().enumerate() {
        let placed: Vec<(usize, f64)> = seeds
            .iter()
            .filter(|(from, _, _)| from.index() == i)
            .map(|(_, to, p)| (to.index(), *p))
            .collect();
        let mass: f64 = placed.iter().map(|p| p.1).sum();
        let free = N - placed.len();
        let rest = if free == 0 {
            0.0
        } else {
            (1.0 - mass) / free as f64
        };
        row.fill(rest);
        for (j, p) in placed {
            row[j] = p;
        }
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= total);
    }
    chain
}

pub fn default_deceptive_chain() -> Chain {
    chain_from_seeds(&DECEPTIVE_SEEDS)
}

pub fn default_truthful_chain() -> Chain {
    chain_from_seeds(&TRUTHFUL_SEEDS)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub n_clips_per_class: usize,
    pub frames_min: usize,
    pub frames_max: usize,
    pub deceptive_chain: Chain,
    pub truthful_chain: Chain,
    /// Initial state distributions, deceptive first.
    pub initial_distributions: [Distribution7; 2],
    /// 1 keeps the class chains apart, 0 gives both classes their average.
    pub separation: f64,
    pub audio_noise: f64,
    pub n_identities: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        let uniform = [1.0 / EmotionState::COUNT as f64; EmotionState::COUNT];
        SynthConfig {
            n_clips_per_class: 100,
            frames_min: 150,
            frames_max: 1500,
            deceptive_chain: default_deceptive_chain(),
            truthful_chain: default_truthful_chain(),
            initial_distributions: [uniform, uniform],
            separation: 1.0,
            audio_noise: 0.1,
            n_identities: 58,
            seed: 0,
        }
    }
}

fn check_distribution(name: &str, row: &[f64]) -> Result<()> {
    if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidChain(format!(
            "{name} has a negative or non-finite entry"
        )));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_TOLERANCE {
        return Err(Error::InvalidChain(format!("{name} sums to {sum}")));
    }
    Ok(())
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        for (class, chain) in [
            ("deceptive", &self.deceptive_chain),
            ("truthful", &self.truthful_chain),
        ] {
            for (i, row) in chain.iter().enumerate() {
                check_distribution(&format!("{class} chain row {}", EmotionState::ALL[i]), row)?;
            }
        }
        for (class, dist) in ["deceptive", "truthful"]
            .iter()
            .zip(&self.initial_distributions)
        {
            check_distribution(&format!("{class} initial distribution"), dist)?;
        }
        let invalid = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.n_clips_per_class == 0 {
            return invalid("n_clips_per_class must be positive");
        }
        if self.frames_min == 0 || self.frames_min > self.frames_max {
            return invalid("need 1 <= frames_min <= frames_max");
        }
        if !(0.0..=1.0).contains(&self.separation) {
            return invalid("separation must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.audio_noise) {
            return invalid("audio_noise must lie in [0, 1]");
        }
        if self.n_identities == 0 {
            return invalid("n_identities must be positive");
        }
        Ok(())
    }

    /// The chain and initial distribution actually sampled for `label`.
    pub fn effective(&self, label: Label) -> (Chain, Distribution7) {
        let s = self.separation;
        let (own, other, own_init, other_init) = match label {
            Label::Deceptive => (
                &self.deceptive_chain,
                &self.truthful_chain,
                &self.initial_distributions[0],
                &self.initial_distributions[1],
            ),
            Label::Truthful => (
                &self.truthful_chain,
                &self.deceptive_chain,
                &self.initial_distributions[1],
                &self.initial_distributions[0],
            ),
        };
        // (1 - s) * mean + s * own
        let blend = |a: f64, b: f64| (1.0 - s) * 0.5 * (a + b) + s * a;
        let mut chain = [[0.0; EmotionState::COUNT]; EmotionState::COUNT];
        let mut init = [0.0; EmotionState::COUNT];
        for i in 0..EmotionState::COUNT {
            for j in 0..EmotionState::COUNT {
                chain[i][j] = blend(own[i][j], other[i][j]);
            }
            init[i] = blend(own_init[i], other_init[i]);
        }
        (chain, init)
    }
}

/// One audio label per 15-frame window: the window's most frequent visual
/// state, ties to the lowest state index.
pub fn window_majority(states: &[EmotionState]) -> Vec<EmotionState> {
    states
        .chunks(AUDIO_EXPANSION_FACTOR)
        .map(|w| {
            let mut counts = [0usize; EmotionState::COUNT];
            for s in w {
                counts[s.index()] += 1;
            }
            let best = (0..EmotionState::COUNT)
                .max_by_key(|&i| (counts[i], std::cmp::Reverse(i)))
                .expect("seven states");
            EmotionState::ALL[best]
        })
        .collect()
}

fn sample_clip(
    config: &SynthConfig,
    label: Label,
    seed: u64,
) -> (Vec<EmotionState>, Vec<EmotionState>) {
    let mut r = rng::seeded(seed);
    let (chain, init) = config.effective(label);
    let rows: Vec<WeightedIndex<f64>> = chain
        .iter()
        .map(|row| WeightedIndex::new(row).expect("validated row"))
        .collect();
    let n = r.random_range(config.frames_min..=config.frames_max);
    let mut state = WeightedIndex::new(init)
        .expect("validated distribution")
        .sample(&mut r);
    let mut visual = Vec::with_capacity(n);
    visual.push(EmotionState::ALL[state]);
    for _ in 1..n {
        state = rows[state].sample(&mut r);
        visual.push(EmotionState::ALL[state]);
    }
    let audio = window_majority(&visual)
        .into_iter()
        .map(|s| {
            if r.random_bool(config.audio_noise) {
                // uniform over the six other states
                let shift = r.random_range(1..EmotionState::COUNT);
                EmotionState::ALL[(s.index() + shift) % EmotionState::COUNT]
            } else {
                s
            }
        })
        .collect();
    (visual, audio)
}

/// Generates `2 * n_clips_per_class` clips. Clip `i` (deceptive ones first)
/// is `synth_{i:04}` and is sampled from its own seed `derive_seed(seed, [i])`.
/// Identities are dealt round-robin within each class, so the j-th deceptive
/// and the j-th truthful clip share a speaker.
pub fn synth_corpus(config: &SynthConfig) -> Result<Corpus> {
    config.validate()?;
    let n = config.n_clips_per_class;
    let clips: Vec<(ManifestEntry, Vec<EmotionState>, Vec<EmotionState>)> = (0..2 * n)
        .into_par_iter()
        .map(|i| {
            let label = if i < n {
                Label::Deceptive
            } else {
                Label::Truthful
            };
            let (visual, audio) = sample_clip(config, label, derive_seed(config.seed, &[i as u64]));
            let entry = ManifestEntry {
                clip_id: format!("synth_{i:04}"),
                label,
                identity: format!("id_{:03}", (i % n) % config.n_identities),
                source_video: format!("synth_video_{i:04}.mp4"),
                n_frames: visual.len(),
            };
            (entry, visual, audio)
        })
        .collect();

    let mut entries = Vec::with_capacity(clips.len());
    let mut visual = BTreeMap::new();
    let mut audio = BTreeMap::new();
    for (entry, v, a) in clips {
        visual.insert(
            entry.clip_id.clone(),
            EmotionTrack::visual(entry.clip_id.clone(), v),
        );
        audio.insert(
            entry.clip_id.clone(),
            EmotionTrack::audio(entry.clip_id.clone(), a),
        );
        entries.push(entry);
    }
    Ok(Corpus {
        manifest: CorpusManifest::new(entries)?,
        visual,
        audio,
        blocks: Vec::new(),
    })
}
