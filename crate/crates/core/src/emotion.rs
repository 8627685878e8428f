//! The seven-state emotion domain and the audio/visual voting step.
//!
//! Visual tracks carry one state per frame (30 fps); audio tracks carry one
//! state per 0.5 s segment. An audio track is stretched to frame resolution
//! with [`expand_audio`] and then combined with the visual track by
//! [`revise`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of frames covered by one 0.5 s audio segment at 30 fps.
pub const AUDIO_EXPANSION_FACTOR: usize = 15;

/// Visual frame rate, in samples per second.
pub const VISUAL_RATE: f64 = 30.0;

/// Audio segment rate, in samples per second.
pub const AUDIO_RATE: f64 = 2.0;

/// One of the seven universal emotions.
///
/// The discriminant is the canonical index used by every transition matrix
/// and feature layout in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EmotionState {
    Angry = 0,
    Disgust = 1,
    Fear = 2,
    Happy = 3,
    Sad = 4,
    Surprise = 5,
    Neutral = 6,
}

impl EmotionState {
    pub const COUNT: usize = 7;

    pub const ALL: [EmotionState; 7] = [
        EmotionState::Angry,
        EmotionState::Disgust,
        EmotionState::Fear,
        EmotionState::Happy,
        EmotionState::Sad,
        EmotionState::Surprise,
        EmotionState::Neutral,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            EmotionState::Angry => "Angry",
            EmotionState::Disgust => "Disgust",
            EmotionState::Fear => "Fear",
            EmotionState::Happy => "Happy",
            EmotionState::Sad => "Sad",
            EmotionState::Surprise => "Surprise",
            EmotionState::Neutral => "Neutral",
        }
    }
}

impl fmt::Display for EmotionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EmotionState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_state(s)
    }
}

/// Case-insensitive match against the seven canonical names. No aliases.
pub fn parse_state(label: &str) -> Result<EmotionState> {
    EmotionState::ALL
        .iter()
        .copied()
        .find(|state| state.name().eq_ignore_ascii_case(label))
        .ok_or_else(|| Error::UnknownEmotionLabel(label.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Visual,
    Audio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionTrack {
    pub clip_id: String,
    pub modality: Modality,
    pub states: Vec<EmotionState>,
    /// Samples per second.
    pub rate: f64,
}

impl EmotionTrack {
    pub fn visual(clip_id: impl Into<String>, states: Vec<EmotionState>) -> Self {
        EmotionTrack {
            clip_id: clip_id.into(),
            modality: Modality::Visual,
            states,
            rate: VISUAL_RATE,
        }
    }

    pub fn audio(clip_id: impl Into<String>, states: Vec<EmotionState>) -> Self {
        EmotionTrack {
            clip_id: clip_id.into(),
            modality: Modality::Audio,
            states,
            rate: AUDIO_RATE,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Per-frame states after audio/visual voting; same length as the visual track.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevisedTrack {
    pub clip_id: String,
    pub states: Vec<EmotionState>,
}

impl RevisedTrack {
    pub fn new(clip_id: impl Into<String>, states: Vec<EmotionState>) -> Self {
        RevisedTrack {
            clip_id: clip_id.into(),
            states,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Repeats every audio segment state `factor` times.
///
/// # Panics
///
/// Panics if `audio` is not an audio track or `factor` is zero.
pub fn expand_audio(audio: &EmotionTrack, factor: usize) -> Vec<EmotionState> {
    assert_eq!(
        audio.modality,
        Modality::Audio,
        "expand_audio needs an audio track"
    );
    expand_states(&audio.states, factor)
}

pub fn expand_states(states: &[EmotionState], factor: usize) -> Vec<EmotionState> {
    assert!(factor > 0, "expansion factor must be positive");
    states
        .iter()
        .flat_map(|&s| std::iter::repeat_n(s, factor))
        .collect()
}

/// Frame-level voting between the visual track and the expanded audio track.
///
/// For every frame but the last, the next visual state wins when the audio
/// agrees with it; otherwise the current visual state is kept. The last frame
/// always keeps its visual state. Audio shorter than `n - 1` frames is padded
/// with its final state; an empty audio track leaves the visual track as is.
///
/// # Panics
///
/// Panics if `visual` is not a visual track.
pub fn revise(visual: &EmotionTrack, expanded_audio: &[EmotionState]) -> RevisedTrack {
    assert_eq!(
        visual.modality,
        Modality::Visual,
        "revise needs a visual track"
    );
    RevisedTrack::new(
        visual.clip_id.clone(),
        revise_states(&visual.states, expanded_audio),
    )
}

pub fn revise_states(
    visual: &[EmotionState],
    expanded_audio: &[EmotionState],
) -> Vec<EmotionState> {
    let Some(&last_audio) = expanded_audio.last() else {
        return visual.to_vec();
    };
    let n = visual.len();
    let mut revised = Vec::with_capacity(n);
    for i in 0..n.saturating_sub(1) {
        let audio = expanded_audio.get(i).copied().unwrap_or(last_audio);
        let next = visual[i + 1];
        revised.push(if next == audio { next } else { visual[i] });
    }
    if let Some(&last) = visual.last() {
        revised.push(last);
    }
    revised
}

/// Convenience wrapper: expand the optional audio track and vote.
pub fn revise_with_audio(
    visual: &EmotionTrack,
    audio: Option<&EmotionTrack>,
    factor: usize,
) -> RevisedTrack {
    match audio {
        Some(audio) => revise(visual, &expand_audio(audio, factor)),
        None => revise(visual, &[]),
    }
}

#[cfg(test)]
mod tests {
    use super::EmotionState::*;
    use super::*;

    /// Majority of the three votes, ties (all distinct) resolved to the current
    /// visual state.
    fn majority_oracle(
        current: EmotionState,
        next: EmotionState,
        audio: EmotionState,
    ) -> EmotionState {
        let votes = [current, next, audio];
        let count = |s: EmotionState| votes.iter().filter(|&&v| v == s).count();
        votes
            .iter()
            .copied()
            .find(|&s| count(s) >= 2)
            .unwrap_or(current)
    }

    #[test]
    fn parse_is_case_insensitive() {
        assert_eq!(parse_state("sad").unwrap(), Sad);
        assert_eq!(parse_state("NEUTRAL").unwrap(), Neutral);
        assert_eq!(parse_state("SuRpRiSe").unwrap(), Surprise);
        assert!(matches!(parse_state("bored"), Err(Error::UnknownEmotionLabel(s)) if s == "bored"));
        assert!(parse_state("anger").is_err());
        assert!(parse_state("").is_err());
        assert!(parse_state(" sad").is_err());
    }

    #[test]
    fn canonical_indices() {
        for (i, s) in EmotionState::ALL.iter().enumerate() {
            assert_eq!(s.index(), i);
            assert_eq!(EmotionState::from_index(i), Some(*s));
            assert_eq!(parse_state(s.name()).unwrap(), *s);
        }
        assert_eq!(Angry.index(), 0);
        assert_eq!(Neutral.index(), 6);
        assert_eq!(EmotionState::from_index(7), None);
    }

    #[test]
    fn expand_examples() {
        let one = EmotionTrack::audio("c", vec![Sad]);
        assert_eq!(expand_audio(&one, 15), vec![Sad; 15]);
        let two = EmotionTrack::audio("c", vec![Sad, Fear]);
        assert_eq!(expand_audio(&two, 2), vec![Sad, Sad, Fear, Fear]);
        let id = EmotionTrack::audio("c", vec![Happy]);
        assert_eq!(expand_audio(&id, 1), vec![Happy]);
    }

    #[test]
    fn revise_examples() {
        let v = EmotionTrack::visual("c", vec![Angry, Angry, Angry]);
        assert_eq!(
            revise(&v, &[Angry, Angry, Angry]).states,
            vec![Angry, Angry, Angry]
        );

        let v = EmotionTrack::visual("c", vec![Angry, Sad, Fear]);
        assert_eq!(revise(&v, &[Sad, Fear, Fear]).states, vec![Sad, Fear, Fear]);

        let v = EmotionTrack::visual("c", vec![Angry, Sad]);
        assert_eq!(revise(&v, &[Happy, Happy]).states, vec![Angry, Sad]);
    }

    #[test]
    fn revise_pads_short_audio_with_last_state() {
        let v = EmotionTrack::visual("c", vec![Angry, Sad, Sad, Fear]);
        // padded audio is [Sad, Fear, Fear]
        assert_eq!(revise(&v, &[Sad]).states, vec![Sad, Sad, Sad, Fear]);
        assert_eq!(
            revise(&v, &[Happy, Fear]).states,
            vec![Angry, Sad, Fear, Fear]
        );
    }

    #[test]
    fn revise_without_audio_is_visual() {
        let v = EmotionTrack::visual("c", vec![Angry, Sad, Fear, Fear]);
        assert_eq!(revise(&v, &[]).states, v.states);
        assert_eq!(revise_with_audio(&v, None, 15).states, v.states);
    }

    #[test]
    fn revise_single_frame() {
        let v = EmotionTrack::visual("c", vec![Happy]);
        assert_eq!(revise(&v, &[Sad]).states, vec![Happy]);
    }

    #[test]
    fn voting_rule_equals_majority_on_all_triples() {
        for &cur in &EmotionState::ALL {
            for &next in &EmotionState::ALL {
                for &audio in &EmotionState::ALL {
                    let got = revise_states(&[cur, next], &[audio, audio]);
                    assert_eq!(
                        got[0],
                        majority_oracle(cur, next, audio),
                        "{cur} {next} {audio}"
                    );
                    assert_eq!(got[1], next);
                }
            }
        }
    }

    #[test]
    #[should_panic]
    fn expand_rejects_visual_track() {
        expand_audio(&EmotionTrack::visual("c", vec![Sad]), 15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn state() -> impl Strategy<Value = EmotionState> {
            (0usize..7).prop_map(|i| EmotionState::from_index(i).unwrap())
        }

        proptest! {
            #[test]
            fn identical_tracks_are_fixed_points(states in prop::collection::vec(state(), 1..80)) {
                let v = EmotionTrack::visual("c", states.clone());
                prop_assert_eq!(revise(&v, &states).states, states);
            }

            #[test]
            fn revise_preserves_length_and_draws_from_votes(
                visual in prop::collection::vec(state(), 1..80),
                audio in prop::collection::vec(state(), 0..100),
            ) {
                let out = revise_states(&visual, &audio);
                prop_assert_eq!(out.len(), visual.len());
                let n = visual.len();
                prop_assert_eq!(out[n - 1], visual[n - 1]);
                for i in 0..n - 1 {
                    let a = audio.get(i).or(audio.last()).copied();
                    prop_assert!(out[i] == visual[i] || out[i] == visual[i + 1]);
                    if out[i] != visual[i] {
                        prop_assert_eq!(Some(out[i]), a);
                    }
                }
            }

            #[test]
            fn revise_is_local(
                visual in prop::collection::vec(state(), 4..60),
                audio in prop::collection::vec(state(), 60..61),
                pos in 0usize..60,
                replacement in state(),
            ) {
                let n = visual.len();
                let pos = pos % n;
                let before = revise_states(&visual, &audio);
                let mut perturbed = visual.clone();
                perturbed[pos] = replacement;
                let after = revise_states(&perturbed, &audio);
                for i in 0..n {
                    // output i reads visual i and i + 1 only
                    if i != pos && i + 1 != pos {
                        prop_assert_eq!(before[i], after[i]);
                    }
                }
            }

            #[test]
            fn expansion_round_trips(audio in prop::collection::vec(state(), 0..40), factor in 1usize..20) {
                let expanded = expand_states(&audio, factor);
                prop_assert_eq!(expanded.len(), audio.len() * factor);
                for (j, s) in expanded.iter().enumerate() {
                    prop_assert_eq!(*s, audio[j / factor]);
                }
            }
        }
    }
}
