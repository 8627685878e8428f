//! Emotion state transition (EST) features for deception detection.
//!
//! The pipeline: per-frame visual emotion labels are revised by a vote with
//! the next frame and the aligned audio label, the revised sequence is turned
//! into a 49-dim transition frequency vector, that vector is fused with any
//! auxiliary feature blocks, filtered by correlation with the label, and fed
//! to one of five classifiers under repeated K-fold cross-validation.

pub mod corpus;
pub mod emotion;
pub mod error;
pub mod est;
pub mod eval;
pub mod extract;
pub mod fusion;
pub mod learners;
pub mod rng;
pub mod synth;

pub use emotion::{EmotionState, EmotionTrack, Modality, RevisedTrack};
pub use error::{Error, Result};
pub use est::{est_feature, EstVector};
pub use fusion::{FeatureBlock, FeatureRecord, Label, SelectionMask};
pub use learners::{LearnerKind, LearnerSpec, TrainedModel};
