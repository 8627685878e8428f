//! The five binary classifiers: linear SVM, decision tree, random forest,
//! k-nearest neighbours and logistic regression.
//!
//! Every trained model exposes a real-valued [`TrainedModel::decision_score`]
//! that grows with confidence in the positive (deceptive) class, and
//! predicts positive iff that score exceeds the kind's threshold.

pub mod forest;
pub mod knn;
pub mod linear;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::Label;
use forest::{ForestOptions, RandomForest};
use knn::KnnModel;
use linear::{LinearModel, SolverOptions};
use tree::{DecisionTree, TreeOptions};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    LinearSvm,
    DecisionTree,
    RandomForest,
    Knn,
    LogisticRegression,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 5] = [
        LearnerKind::LinearSvm,
        LearnerKind::DecisionTree,
        LearnerKind::RandomForest,
        LearnerKind::Knn,
        LearnerKind::LogisticRegression,
    ];

    pub fn id(self) -> &'static str {
        match self {
            LearnerKind::LinearSvm => "linear_svm",
            LearnerKind::DecisionTree => "decision_tree",
            LearnerKind::RandomForest => "random_forest",
            LearnerKind::Knn => "knn",
            LearnerKind::LogisticRegression => "logistic_regression",
        }
    }

    /// Short column label for summary tables.
    pub fn short_name(self) -> &'static str {
        match self {
            LearnerKind::LinearSvm => "L-SVM",
            LearnerKind::DecisionTree => "DT",
            LearnerKind::RandomForest => "RF",
            LearnerKind::Knn => "kNN",
            LearnerKind::LogisticRegression => "LR",
        }
    }

    /// Margin models split at 0; probability models and kNN (k/2 votes,
    /// expressed as a fraction of k) split at 0.5.
    pub fn threshold(self) -> f64 {
        match self {
            LearnerKind::LinearSvm => 0.0,
            _ => 0.5,
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        LearnerKind::ALL
            .iter()
            .copied()
            .find(|k| k.id() == lower || k.short_name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown classifier `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// floor(sqrt(d)), at least 1.
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, d: usize) -> Option<usize> {
        match self {
            MaxFeatures::Sqrt => Some(((d as f64).sqrt().floor() as usize).max(1)),
            MaxFeatures::All => None,
            MaxFeatures::Count(n) => Some(n.clamp(1, d.max(1))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub c: f64,
    pub k_neighbors: usize,
    pub max_depth: usize,
    pub n_estimators: usize,
    pub bootstrap: bool,
    pub max_features: MaxFeatures,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            c: 1.0,
            k_neighbors: 3,
            max_depth: 10,
            n_estimators: 100,
            bootstrap: true,
            max_features: MaxFeatures::Sqrt,
            tolerance: 1e-6,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub kind: LearnerKind,
    pub hyperparameters: Hyperparameters,
    pub seed: u64,
}

impl LearnerSpec {
    pub fn new(kind: LearnerKind) -> Self {
        LearnerSpec {
            kind,
            hyperparameters: Hyperparameters::default(),
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelParameters {
    Linear(LinearModel),
    Tree(DecisionTree),
    Forest(RandomForest),
    Knn(KnnModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub spec: LearnerSpec,
    pub n_features: usize,
    pub parameters: ModelParameters,
}

fn validate(rows: &[Vec<f64>], labels: &[Label]) -> Result<usize> {
    if rows.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            found: labels.len(),
        });
    }
    let d = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.len(),
        });
    }
    Ok(d)
}

pub fn train(spec: &LearnerSpec, rows: &[Vec<f64>], labels: &[Label]) -> Result<TrainedModel> {
    let d = validate(rows, labels)?;
    let y: Vec<bool> = labels.iter().map(|&l| l == Label::Deceptive).collect();
    let positives = y.iter().filter(|&&b| b).count();
    let h = &spec.hyperparameters;

    if spec.kind == LearnerKind::Knn {
        if rows.is_empty() {
            return Err(Error::TooFewSamples {
                needed: 1,
                available: 0,
            });
        }
    } else {
        if rows.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                available: rows.len(),
            });
        }
        if positives == 0 || positives == y.len() {
            return Err(Error::SingleClassTraining);
        }
    }

    let solver = SolverOptions {
        c: h.c,
        tolerance: h.tolerance,
        max_iterations: h.max_iterations,
        seed: spec.seed,
    };
    let parameters = match spec.kind {
        LearnerKind::LinearSvm => ModelParameters::Linear(linear::train_svm(rows, &y, &solver)),
        LearnerKind::LogisticRegression => {
            ModelParameters::Linear(linear::train_logistic(rows, &y, &solver))
        }
        LearnerKind::DecisionTree => {
            let samples: Vec<usize> = (0..rows.len()).collect();
            let opts = TreeOptions {
                max_depth: h.max_depth,
                max_features: None,
            };
            ModelParameters::Tree(tree::grow(
                rows,
                &y,
                &samples,
                &opts,
                &mut crate::rng::seeded(spec.seed),
            ))
        }
        LearnerKind::RandomForest => ModelParameters::Forest(forest::train(
            rows,
            &y,
            &ForestOptions {
                n_estimators: h.n_estimators,
                bootstrap: h.bootstrap,
                tree: TreeOptions {
                    max_depth: h.max_depth,
                    max_features: h.max_features.resolve(d),
                },
                seed: spec.seed,
            },
        )),
        LearnerKind::Knn => ModelParameters::Knn(KnnModel {
            k: h.k_neighbors,
            rows: rows.to_vec(),
            labels: y,
        }),
    };
    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        spec: spec.clone(),
        n_features: d,
        parameters,
    })
}

impl TrainedModel {
    pub fn decision_score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        Ok(match &self.parameters {
            ModelParameters::Linear(m) => match self.spec.kind {
                LearnerKind::LogisticRegression => linear::sigmoid(m.margin(x)),
                _ => m.margin(x),
            },
            ModelParameters::Tree(t) => t.score(x),
            ModelParameters::Forest(f) => f.score(x),
            ModelParameters::Knn(k) => k.score(x),
        })
    }

    pub fn threshold(&self) -> f64 {
        self.spec.kind.threshold()
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        Ok(if self.decision_score(x)? > self.threshold() {
            Label::Deceptive
        } else {
            Label::Truthful
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let model: TrainedModel = serde_json::from_str(s)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported model format version {}",
                model.format_version
            )));
        }
        let d = model.n_features;
        let consistent = match (&model.parameters, model.spec.kind) {
            (
                ModelParameters::Linear(m),
                LearnerKind::LinearSvm | LearnerKind::LogisticRegression,
            ) => m.weights.len() == d && m.weights.iter().chain([&m.bias]).all(|v| v.is_finite()),
            (ModelParameters::Tree(t), LearnerKind::DecisionTree) => t.is_well_formed(d),
            (ModelParameters::Forest(f), LearnerKind::RandomForest) => {
                !f.trees.is_empty() && f.trees.iter().all(|t| t.is_well_formed(d))
            }
            (ModelParameters::Knn(k), LearnerKind::Knn) => {
                k.k > 0 && k.labels.len() == k.rows.len() && k.rows.iter().all(|r| r.len() == d)
            }
            _ => false,
        };
        if !consistent {
            return Err(Error::InvalidConfig(format!(
                "model parameters do not match a {} model over {d} features",
                model.spec.kind
            )));
        }
        Ok(model)
    }
}
