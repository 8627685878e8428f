//! Corpus-level EST extraction and the class-conditional aggregate report.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{format_f64, Corpus};
use crate::emotion::{revise_with_audio, EmotionState, RevisedTrack, AUDIO_EXPANSION_FACTOR};
use crate::error::{Error, Result};
use crate::est::{
    emotion_distribution, est_feature, feature_pair, top_transitions, transition_counts, EstVector,
    RankedTransition, TransitionMatrix, EST_DIM,
};
use crate::fusion::{FeatureBlock, Label};

pub const EST_BLOCK: &str = "est";

/// Revised track of every manifest clip, in clip id order. Clips without
/// audio fall back to visual-only revision.
pub fn revise_corpus(corpus: &Corpus) -> Result<Vec<RevisedTrack>> {
    corpus
        .manifest
        .entries()
        .par_iter()
        .map(|e| {
            let visual = corpus
                .visual
                .get(&e.clip_id)
                .ok_or_else(|| Error::MissingClip {
                    clip_id: e.clip_id.clone(),
                    source_name: "visual tracks".into(),
                })?;
            Ok(revise_with_audio(
                visual,
                corpus.audio.get(&e.clip_id),
                AUDIO_EXPANSION_FACTOR,
            ))
        })
        .collect()
}

pub fn est_block(revised: &[RevisedTrack]) -> FeatureBlock {
    let mut block = FeatureBlock::new(EST_BLOCK, EST_DIM);
    for r in revised {
        block
            .insert(r.clip_id.clone(), est_feature(r).values)
            .expect("EST rows have EST_DIM entries");
    }
    block
}

/// Which per-frame sequence an aggregate is computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrackSource {
    /// After audio-visual voting; this is what the EST features see.
    Revised,
    /// The raw visual labels, before voting.
    Visual,
}

impl TrackSource {
    pub fn name(self) -> &'static str {
        match self {
            TrackSource::Revised => "revised",
            TrackSource::Visual => "visual",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAggregate {
    pub source: TrackSource,
    pub label: Label,
    pub n_clips: usize,
    /// Clips too short to have a transition; left out of `clip_mean_est`.
    pub n_degenerate: usize,
    /// Mean of the per-clip emotion distributions.
    pub clip_mean_distribution: [f64; EmotionState::COUNT],
    /// Frame counts over all clips of the class, normalized once.
    pub pooled_distribution: [f64; EmotionState::COUNT],
    pub clip_mean_est: Vec<f64>,
    /// Counted transitions over all clips, normalized once.
    pub pooled_est: Vec<f64>,
}

impl ClassAggregate {
    pub fn top_clip_mean(&self, count: usize) -> Vec<RankedTransition> {
        top_transitions(
            &EstVector {
                values: self.clip_mean_est.clone(),
                degenerate: false,
            },
            count,
        )
    }

    pub fn top_pooled(&self, count: usize) -> Vec<RankedTransition> {
        top_transitions(
            &EstVector {
                values: self.pooled_est.clone(),
                degenerate: false,
            },
            count,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub classes: Vec<ClassAggregate>,
}

/// Per-class emotion distribution and EST, both as the mean over clips and
/// as pooled counts, for the revised tracks and for the raw visual tracks.
/// Classes without clips are omitted.
pub fn aggregate_report(corpus: &Corpus, revised: &[RevisedTrack]) -> AggregateReport {
    let mut classes = Vec::new();
    for source in [TrackSource::Revised, TrackSource::Visual] {
        for label in [Label::Deceptive, Label::Truthful] {
            let in_class = |id: &str| corpus.manifest.get(id).is_some_and(|e| e.label == label);
            let tracks: Vec<&[EmotionState]> = match source {
                TrackSource::Revised => revised
                    .iter()
                    .filter(|r| in_class(&r.clip_id))
                    .map(|r| r.states.as_slice())
                    .collect(),
                TrackSource::Visual => corpus
                    .visual
                    .iter()
                    .filter(|(id, _)| in_class(id))
                    .map(|(_, t)| t.states.as_slice())
                    .collect(),
            };
            if !tracks.is_empty() {
                classes.push(aggregate_class(source, label, &tracks));
            }
        }
    }
    AggregateReport { classes }
}

fn aggregate_class(
    source: TrackSource,
    label: Label,
    tracks: &[&[EmotionState]],
) -> ClassAggregate {
    let mut dist_sum = [0.0; EmotionState::COUNT];
    let mut frame_counts = [0usize; EmotionState::COUNT];
    let mut est_sum = vec![0.0; EST_DIM];
    let mut pooled = TransitionMatrix::default();
    let mut n_degenerate = 0;
    for states in tracks {
        for (acc, d) in dist_sum.iter_mut().zip(emotion_distribution(states)) {
            *acc += d;
        }
        for s in *states {
            frame_counts[s.index()] += 1;
        }
        let counts = transition_counts(states);
        let est = counts.normalized();
        if est.degenerate {
            n_degenerate += 1;
        } else {
            est_sum
                .iter_mut()
                .zip(&est.values)
                .for_each(|(a, v)| *a += v);
        }
        pooled.add(&counts);
    }
    let n = tracks.len() as f64;
    let total_frames: usize = frame_counts.iter().sum();
    let usable = (tracks.len() - n_degenerate) as f64;
    ClassAggregate {
        source,
        label,
        n_clips: tracks.len(),
        n_degenerate,
        clip_mean_distribution: dist_sum.map(|d| d / n),
        pooled_distribution: frame_counts.map(|c| {
            if total_frames == 0 {
                0.0
            } else {
                c as f64 / total_frames as f64
            }
        }),
        clip_mean_est: est_sum
            .iter()
            .map(|v| if usable > 0.0 { v / usable } else { 0.0 })
            .collect(),
        pooled_est: pooled.normalized().values,
    }
}

impl AggregateReport {
    pub fn get(&self, source: TrackSource, label: Label) -> Option<&ClassAggregate> {
        self.classes
            .iter()
            .find(|c| c.source == source && c.label == label)
    }

    /// Long format: `source,class,statistic,aggregation,key,value`, where
    /// source is `revised` or `visual`, statistic is `distribution` (key =
    /// state) or `est` (key = `From->To`) and aggregation is `clip_mean` or
    /// `pooled`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("source,class,statistic,aggregation,key,value\n");
        for c in &self.classes {
            let class = format!("{},{}", c.source.name(), c.label.name());
            for (agg, dist) in [
                ("clip_mean", &c.clip_mean_distribution),
                ("pooled", &c.pooled_distribution),
            ] {
                for (s, v) in EmotionState::ALL.iter().zip(dist) {
                    let _ = writeln!(out, "{class},distribution,{agg},{s},{}", format_f64(*v));
                }
            }
            for (agg, est) in [("clip_mean", &c.clip_mean_est), ("pooled", &c.pooled_est)] {
                for (i, v) in est.iter().enumerate() {
                    let (from, to) = feature_pair(i).expect("index below EST_DIM");
                    let _ = writeln!(out, "{class},est,{agg},{from}->{to},{}", format_f64(*v));
                }
            }
        }
        out
    }

    /// Top transitions per class under both aggregations, as printable text.
    pub fn top_table(&self, count: usize) -> String {
        let mut out = String::new();
        for c in &self.classes {
            for (agg, top) in [
                ("clip mean", c.top_clip_mean(count)),
                ("pooled", c.top_pooled(count)),
            ] {
                let _ = writeln!(
                    out,
                    "{} {} ({agg}, {} clips)",
                    c.source.name(),
                    c.label.name(),
                    c.n_clips
                );
                for t in top {
                    let _ = writeln!(out, "  {:>8} -> {:<8} {:.4}", t.from, t.to, t.value);
                }
            }
        }
        out
    }
}
