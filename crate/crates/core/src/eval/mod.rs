//! Cross-validation and the repeated-trials reporting protocol.
//!
//! Per fold, standardization, feature selection and the model are all fit on
//! the training part only (unless global selection is requested) and then
//! applied to the held-out part. A trial is one full K-fold pass under its
//! own shuffle; the report keeps, per metric and independently, the best
//! trial and the mean of the ten best trials.

pub mod folds;
pub mod metrics;

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fusion::{
    k_for_ratio, select_top_k, FeatureRecord, Label, SelectionMask, SelectionMethod, Standardizer,
};
use crate::learners::{self, LearnerKind, LearnerSpec};
use crate::rng::derive_seed;
pub use folds::{make_folds, FoldPlan, FoldStrategy};
pub use metrics::{roc_auc, Confusion};

pub const REPORT_FORMAT_VERSION: u32 = 1;

type RowFn = Box<dyn Fn(&ClassifierReport) -> Option<f64>>;

/// How many trials enter the "top" average.
pub const TOP_TRIALS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum SelectionSize {
    /// Keep every feature (no filtering).
    All,
    TopK(usize),
    Ratio(f64),
}

impl SelectionSize {
    pub fn resolve(self, dimension: usize) -> usize {
        match self {
            SelectionSize::All => dimension,
            SelectionSize::TopK(k) => k.min(dimension),
            SelectionSize::Ratio(r) => k_for_ratio(dimension, r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub selection: SelectionSize,
    pub method: SelectionMethod,
    /// Fit the selection on the whole dataset instead of per training fold.
    pub select_global: bool,
    pub standardize: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            selection: SelectionSize::Ratio(0.1),
            method: SelectionMethod::Pearson,
            select_global: false,
            standardize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub n_test: usize,
    pub accuracy: f64,
    /// `None` when the held-out fold holds a single class.
    pub roc_auc: Option<f64>,
    pub confusion: Confusion,
    pub n_selected: usize,
    pub selection_hash: String,
}

pub fn hash_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn mask_hash(mask: &SelectionMask) -> String {
    let text: Vec<String> = mask.sorted_indices().iter().map(usize::to_string).collect();
    hash_hex(text.join(",").as_bytes())[..16].to_string()
}

fn fit_selection(
    rows: &[Vec<f64>],
    labels: &[Label],
    config: &PipelineConfig,
) -> Result<SelectionMask> {
    let dim = rows.first().map_or(0, Vec::len);
    if config.selection == SelectionSize::All {
        return Ok(SelectionMask::identity(dim));
    }
    let scores = config.method.scores(rows, labels)?;
    Ok(select_top_k(&scores, config.selection.resolve(dim)))
}

/// Runs one K-fold pass. Fold `f` trains with seed
/// `derive_seed(spec.seed, [plan.seed, f])`. Failures come back as
/// `Error::Evaluation` naming the fold (trial 0).
pub fn cross_validate(
    spec: &LearnerSpec,
    records: &[FeatureRecord],
    plan: &FoldPlan,
    config: &PipelineConfig,
) -> Result<Vec<FoldMetrics>> {
    if plan.assignments.len() != records.len() {
        return Err(Error::DimensionMismatch {
            expected: records.len(),
            found: plan.assignments.len(),
        });
    }
    let rows: Vec<Vec<f64>> = records.iter().map(|r| r.features.clone()).collect();
    let labels: Vec<Label> = records.iter().map(|r| r.label).collect();
    let global = if config.select_global {
        Some(fit_selection(&rows, &labels, config)?)
    } else {
        None
    };

    (0..plan.k)
        .map(|fold| {
            run_fold(spec, &rows, &labels, plan, fold, global.as_ref(), config).map_err(|e| {
                Error::Evaluation {
                    classifier: spec.kind.id().to_string(),
                    trial: 0,
                    fold,
                    source: Box::new(e),
                }
            })
        })
        .collect()
}

fn run_fold(
    spec: &LearnerSpec,
    rows: &[Vec<f64>],
    labels: &[Label],
    plan: &FoldPlan,
    fold: usize,
    global: Option<&SelectionMask>,
    config: &PipelineConfig,
) -> Result<FoldMetrics> {
    let train_idx = plan.train_indices(fold);
    let test_idx = plan.test_indices(fold);
    let gather = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<Label>) {
        (
            idx.iter().map(|&i| rows[i].clone()).collect(),
            idx.iter().map(|&i| labels[i]).collect(),
        )
    };
    let (train_rows, train_labels) = gather(&train_idx);
    let (test_rows, test_labels) = gather(&test_idx);

    let mask = match global {
        Some(m) => m.clone(),
        None => fit_selection(&train_rows, &train_labels, config)?,
    };
    let train_rows = mask.apply_rows(&train_rows);
    let test_rows = mask.apply_rows(&test_rows);
    let scaler = if config.standardize {
        Standardizer::fit(&train_rows)
    } else {
        Standardizer::identity(mask.k())
    };
    let train_rows = scaler.transform_rows(&train_rows);
    let test_rows = scaler.transform_rows(&test_rows);

    let fold_spec = LearnerSpec {
        seed: derive_seed(spec.seed, &[plan.seed, fold as u64]),
        ..spec.clone()
    };
    let model = learners::train(&fold_spec, &train_rows, &train_labels)?;
    let scores = test_rows
        .iter()
        .map(|x| model.decision_score(x))
        .collect::<Result<Vec<f64>>>()?;
    let predicted: Vec<Label> = scores
        .iter()
        .map(|&s| {
            if s > model.threshold() {
                Label::Deceptive
            } else {
                Label::Truthful
            }
        })
        .collect();
    let confusion = Confusion::from_predictions(&predicted, &test_labels);
    let auc = match roc_auc(&scores, &test_labels) {
        Ok(v) => Some(v),
        Err(Error::SingleClassTest) => None,
        Err(e) => return Err(e),
    };
    Ok(FoldMetrics {
        fold,
        n_test: test_idx.len(),
        accuracy: confusion.accuracy(),
        roc_auc: auc,
        confusion,
        n_selected: mask.k(),
        selection_hash: mask_hash(&mask),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub fold_seed: u64,
    pub mean_accuracy: f64,
    pub mean_roc_auc: Option<f64>,
    /// Confusion counts summed over the trial's folds.
    pub confusion: Confusion,
    pub folds: Vec<FoldMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub best: f64,
    pub best_trial: usize,
    pub top_mean: f64,
    /// Number of trials averaged into `top_mean` (at most ten).
    pub top_count: usize,
}

/// Best value and mean of the `TOP_TRIALS` best values; equal values rank by
/// trial index.
pub fn summarize(values: &[(usize, f64)]) -> Option<MetricSummary> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let &(best_trial, best) = sorted.first()?;
    let top = &sorted[..sorted.len().min(TOP_TRIALS)];
    Some(MetricSummary {
        best,
        best_trial,
        top_mean: top.iter().map(|v| v.1).sum::<f64>() / top.len() as f64,
        top_count: top.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierReport {
    pub classifier: LearnerKind,
    pub spec: LearnerSpec,
    pub accuracy: MetricSummary,
    pub roc_auc: Option<MetricSummary>,
    pub trials: Vec<TrialResult>,
}

impl ClassifierReport {
    pub fn best_accuracy_trial(&self) -> &TrialResult {
        &self.trials[self
            .trials
            .iter()
            .position(|t| t.trial == self.accuracy.best_trial)
            .unwrap_or(0)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialsConfig {
    pub k: usize,
    pub n_trials: usize,
    pub base_seed: u64,
    pub strategy: FoldStrategy,
    pub pipeline: PipelineConfig,
}

impl Default for TrialsConfig {
    fn default() -> Self {
        TrialsConfig {
            k: 10,
            n_trials: 100,
            base_seed: 0,
            strategy: FoldStrategy::Stratified,
            pipeline: PipelineConfig::default(),
        }
    }
}

/// Repeats cross-validation `n_trials` times; trial `i` builds its folds with
/// seed `base_seed + i`. Trials run in parallel; results do not depend on
/// scheduling.
pub fn run_trials(
    spec: &LearnerSpec,
    records: &[FeatureRecord],
    config: &TrialsConfig,
) -> Result<ClassifierReport> {
    if config.n_trials == 0 {
        return Err(Error::InvalidConfig(
            "at least one trial is required".into(),
        ));
    }
    let clip_ids: Vec<String> = records.iter().map(|r| r.clip_id.clone()).collect();
    let labels: Vec<Label> = records.iter().map(|r| r.label).collect();
    let identities: Vec<String> = records.iter().map(|r| r.identity.clone()).collect();
    let spec = LearnerSpec {
        seed: config.base_seed,
        ..spec.clone()
    };

    let trials = (0..config.n_trials)
        .into_par_iter()
        .map(|trial| {
            let fold_seed = config.base_seed.wrapping_add(trial as u64);
            let plan = make_folds(
                &clip_ids,
                &labels,
                &identities,
                config.k,
                fold_seed,
                config.strategy,
            )
            .map_err(|e| Error::Evaluation {
                classifier: spec.kind.id().to_string(),
                trial,
                fold: 0,
                source: Box::new(e),
            })?;
            let folds =
                cross_validate(&spec, records, &plan, &config.pipeline).map_err(|e| match e {
                    Error::Evaluation {
                        classifier,
                        fold,
                        source,
                        ..
                    } => Error::Evaluation {
                        classifier,
                        trial,
                        fold,
                        source,
                    },
                    other => other,
                })?;
            Ok(trial_result(trial, fold_seed, folds))
        })
        .collect::<Result<Vec<TrialResult>>>()?;

    let accuracy = summarize(
        &trials
            .iter()
            .map(|t| (t.trial, t.mean_accuracy))
            .collect::<Vec<_>>(),
    )
    .expect("at least one trial");
    let aucs: Vec<(usize, f64)> = trials
        .iter()
        .filter_map(|t| t.mean_roc_auc.map(|a| (t.trial, a)))
        .collect();
    Ok(ClassifierReport {
        classifier: spec.kind,
        spec,
        accuracy,
        roc_auc: summarize(&aucs),
        trials,
    })
}

fn trial_result(trial: usize, fold_seed: u64, folds: Vec<FoldMetrics>) -> TrialResult {
    let mean_accuracy = folds.iter().map(|f| f.accuracy).sum::<f64>() / folds.len() as f64;
    let aucs: Vec<f64> = folds.iter().filter_map(|f| f.roc_auc).collect();
    let mean_roc_auc = (!aucs.is_empty()).then(|| aucs.iter().sum::<f64>() / aucs.len() as f64);
    let mut confusion = Confusion::default();
    for f in &folds {
        confusion.add(&f.confusion);
    }
    TrialResult {
        trial,
        fold_seed,
        mean_accuracy,
        mean_roc_auc,
        confusion,
        folds,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub format_version: u32,
    pub config_hash: String,
    /// Verbatim echo of the run configuration.
    pub config: serde_json::Value,
    pub notes: Vec<String>,
    pub classifiers: Vec<ClassifierReport>,
}

impl EvalReport {
    pub fn new(config: serde_json::Value, classifiers: Vec<ClassifierReport>) -> Self {
        let config_hash = hash_hex(config.to_string().as_bytes());
        EvalReport {
            format_version: REPORT_FORMAT_VERSION,
            config_hash,
            config,
            notes: vec![
                "accuracy and roc_auc are per-trial means over folds".into(),
                "best and top-10 mean are ranked per metric independently; they may come from different trials".into(),
                "confusion counts use deceptive as the positive class".into(),
            ],
            classifiers,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// `classifier,trial,fold,accuracy,auc,tp,fp,fn,tn`, one row per fold.
    pub fn folds_csv(&self) -> String {
        let mut out = String::from("classifier,trial,fold,accuracy,auc,tp,fp,fn,tn\n");
        for c in &self.classifiers {
            for t in &c.trials {
                for f in &t.folds {
                    let auc = f.roc_auc.map(|a| a.to_string()).unwrap_or_default();
                    let cm = f.confusion;
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{}",
                        c.classifier, t.trial, f.fold, f.accuracy, auc, cm.tp, cm.fp, cm.fn_, cm.tn
                    )
                    .expect("writing to a String");
                }
            }
        }
        out
    }

    /// Pooled confusion matrix of each classifier's best-accuracy trial as
    /// `classifier,trial,actual,predicted,count` (rows truthful, deceptive).
    pub fn confusion_csv(&self) -> String {
        let mut out = String::from("classifier,trial,actual,predicted,count\n");
        for c in &self.classifiers {
            let t = c.best_accuracy_trial();
            let cm = t.confusion;
            for (actual, predicted, count) in [
                ("truthful", "truthful", cm.tn),
                ("truthful", "deceptive", cm.fp),
                ("deceptive", "truthful", cm.fn_),
                ("deceptive", "deceptive", cm.tp),
            ] {
                writeln!(
                    out,
                    "{},{},{actual},{predicted},{count}",
                    c.classifier, t.trial
                )
                .expect("writing to a String");
            }
        }
        out
    }

    /// Classifiers as columns; best and top-10 mean rows for ROC-AUC and accuracy.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self
            .classifiers
            .iter()
            .map(|c| c.classifier.short_name())
            .collect();
        let _ = write!(out, "{:<22}", "metric");
        for h in &header {
            let _ = write!(out, "{h:>10}");
        }
        out.push('\n');
        let rows: [(&str, RowFn); 4] = [
            (
                "ROC-AUC (best)",
                Box::new(|c| c.roc_auc.as_ref().map(|m| m.best)),
            ),
            (
                "ROC-AUC (top-10 mean)",
                Box::new(|c| c.roc_auc.as_ref().map(|m| m.top_mean)),
            ),
            ("accuracy (best)", Box::new(|c| Some(c.accuracy.best))),
            (
                "accuracy (top-10 mean)",
                Box::new(|c| Some(c.accuracy.top_mean)),
            ),
        ];
        for (name, get) in rows.iter() {
            let _ = write!(out, "{name:<22}");
            for c in &self.classifiers {
                match get(c) {
                    Some(v) => {
                        let _ = write!(out, "{v:>10.4}");
                    }
                    None => {
                        let _ = write!(out, "{:>10}", "-");
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}
