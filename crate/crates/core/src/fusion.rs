//! Feature blocks, fusion into per-clip records, and filter feature selection.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::CorpusManifest;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Truthful = 0,
    Deceptive = 1,
}

impl Label {
    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn from_u8(v: u8) -> Option<Label> {
        match v {
            0 => Some(Label::Truthful),
            1 => Some(Label::Deceptive),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Truthful => "truthful",
            Label::Deceptive => "deceptive",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "truthful" => Some(Label::Truthful),
            "deceptive" => Some(Label::Deceptive),
            _ => None,
        }
    }
}

/// A named clips x dimension matrix, keyed by clip id.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBlock {
    pub name: String,
    dimension: usize,
    rows: BTreeMap<String, Vec<f64>>,
}

impl FeatureBlock {
    pub fn new(name: impl Into<String>, dimension: usize) -> Self {
        FeatureBlock {
            name: name.into(),
            dimension,
            rows: BTreeMap::new(),
        }
    }

    pub fn from_rows<I, S>(name: impl Into<String>, dimension: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut block = FeatureBlock::new(name, dimension);
        for (clip_id, row) in rows {
            block.insert(clip_id, row)?;
        }
        Ok(block)
    }

    /// Adds a row. Fails on a ragged row; a repeated clip id replaces the row.
    pub fn insert(&mut self, clip_id: impl Into<String>, row: Vec<f64>) -> Result<()> {
        if row.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: row.len(),
            });
        }
        self.rows.insert(clip_id.into(), row);
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, clip_id: &str) -> Option<&[f64]> {
        self.rows.get(clip_id).map(Vec::as_slice)
    }

    /// Rows in clip id order.
    pub fn rows(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.rows.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn column_names(&self) -> Vec<String> {
        (0..self.dimension)
            .map(|i| format!("{}_{i}", self.name))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub clip_id: String,
    pub label: Label,
    pub identity: String,
    pub features: Vec<f64>,
}

/// Concatenates the blocks per manifest clip, in block order. Records come out
/// sorted by clip id. Block rows for clips outside the manifest are ignored.
pub fn fuse(blocks: &[FeatureBlock], manifest: &CorpusManifest) -> Result<Vec<FeatureRecord>> {
    let dimension: usize = blocks.iter().map(FeatureBlock::dimension).sum();
    let mut records = Vec::with_capacity(manifest.len());
    for entry in manifest.entries() {
        let mut features = Vec::with_capacity(dimension);
        for block in blocks {
            let row = block
                .row(&entry.clip_id)
                .ok_or_else(|| Error::MissingClip {
                    clip_id: entry.clip_id.clone(),
                    source_name: format!("feature block `{}`", block.name),
                })?;
            features.extend_from_slice(row);
        }
        records.push(FeatureRecord {
            clip_id: entry.clip_id.clone(),
            label: entry.label,
            identity: entry.identity.clone(),
            features,
        });
    }
    records.sort_by(|a, b| a.clip_id.cmp(&b.clip_id));
    Ok(records)
}

/// Scoring statistic for filter selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMethod {
    #[default]
    Pearson,
    Anova,
}

impl SelectionMethod {
    pub fn scores(self, rows: &[Vec<f64>], labels: &[Label]) -> Result<Vec<f64>> {
        match self {
            SelectionMethod::Pearson => pearson_scores_matrix(rows, labels),
            SelectionMethod::Anova => anova_f_scores(rows, labels),
        }
    }
}

fn check_labels(rows: &[Vec<f64>], labels: &[Label]) -> Result<usize> {
    if rows.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            found: labels.len(),
        });
    }
    if rows.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            available: rows.len(),
        });
    }
    let positives = labels.iter().filter(|&&l| l == Label::Deceptive).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::DegenerateLabels);
    }
    let dim = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    Ok(dim)
}

/// |Pearson r| of every feature column against the 0/1 label.
pub fn pearson_scores(records: &[FeatureRecord]) -> Result<Vec<f64>> {
    let rows: Vec<Vec<f64>> = records.iter().map(|r| r.features.clone()).collect();
    let labels: Vec<Label> = records.iter().map(|r| r.label).collect();
    pearson_scores_matrix(&rows, &labels)
}

pub fn pearson_scores_matrix(rows: &[Vec<f64>], labels: &[Label]) -> Result<Vec<f64>> {
    let dim = check_labels(rows, labels)?;
    let n = rows.len() as f64;
    let y: Vec<f64> = labels.iter().map(|l| l.as_u8() as f64).collect();
    let y_mean = y.iter().sum::<f64>() / n;
    let y_dev: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let y_ss: f64 = y_dev.iter().map(|d| d * d).sum();

    let scores = (0..dim)
        .map(|j| {
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let (mut cov, mut ss) = (0.0, 0.0);
            for (r, yd) in rows.iter().zip(&y_dev) {
                let d = r[j] - mean;
                cov += d * yd;
                ss += d * d;
            }
            if ss <= 0.0 {
                return 0.0;
            }
            let r = cov / (ss.sqrt() * y_ss.sqrt());
            // rounding can push |r| a hair past one
            r.abs().min(1.0)
        })
        .collect();
    Ok(scores)
}

/// One-way ANOVA F statistic per feature for the two classes. Constant
/// features score 0; features that separate the classes with zero
/// within-class variance score `f64::MAX`.
pub fn anova_f_scores(rows: &[Vec<f64>], labels: &[Label]) -> Result<Vec<f64>> {
    let dim = check_labels(rows, labels)?;
    let n = rows.len();
    let scores = (0..dim)
        .map(|j| {
            let mut sums = [0.0; 2];
            let mut counts = [0usize; 2];
            for (r, l) in rows.iter().zip(labels) {
                sums[l.as_u8() as usize] += r[j];
                counts[l.as_u8() as usize] += 1;
            }
            let grand = (sums[0] + sums[1]) / n as f64;
            let means = [sums[0] / counts[0] as f64, sums[1] / counts[1] as f64];
            let between: f64 = (0..2)
                .map(|c| counts[c] as f64 * (means[c] - grand).powi(2))
                .sum();
            let within: f64 = rows
                .iter()
                .zip(labels)
                .map(|(r, l)| (r[j] - means[l.as_u8() as usize]).powi(2))
                .sum();
            if between <= 0.0 {
                0.0
            } else if within <= 0.0 || n <= 2 {
                f64::MAX
            } else {
                between / (within / (n - 2) as f64)
            }
        })
        .collect();
    Ok(scores)
}

/// `round(dimension * ratio)`, clamped to `1..=dimension`.
pub fn k_for_ratio(dimension: usize, ratio: f64) -> usize {
    ((dimension as f64 * ratio).round() as usize).clamp(1.min(dimension), dimension)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionMask {
    /// Kept feature indices, by descending score then ascending index.
    pub kept_indices: Vec<usize>,
    /// Score of every input feature.
    pub scores: Vec<f64>,
}

impl SelectionMask {
    pub fn identity(dimension: usize) -> Self {
        SelectionMask {
            kept_indices: (0..dimension).collect(),
            scores: vec![0.0; dimension],
        }
    }

    pub fn dimension(&self) -> usize {
        self.scores.len()
    }

    pub fn k(&self) -> usize {
        self.kept_indices.len()
    }

    /// Kept indices in ascending order; this is the column order `apply` uses.
    pub fn sorted_indices(&self) -> Vec<usize> {
        let mut idx = self.kept_indices.clone();
        idx.sort_unstable();
        idx
    }

    /// Projects a feature vector onto the kept features, preserving the
    /// original column order.
    pub fn apply(&self, features: &[f64]) -> Vec<f64> {
        self.sorted_indices()
            .into_iter()
            .map(|i| features[i])
            .collect()
    }

    pub fn apply_rows(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let idx = self.sorted_indices();
        rows.iter()
            .map(|r| idx.iter().map(|&i| r[i]).collect())
            .collect()
    }

    /// Splits the mask into per-block local index lists, given block
    /// dimensions in fusion order.
    pub fn split_by_blocks(&self, dimensions: &[usize]) -> Vec<Vec<usize>> {
        let sorted = self.sorted_indices();
        let mut out = Vec::with_capacity(dimensions.len());
        let mut offset = 0;
        for &d in dimensions {
            out.push(
                sorted
                    .iter()
                    .filter(|&&i| i >= offset && i < offset + d)
                    .map(|&i| i - offset)
                    .collect(),
            );
            offset += d;
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let mask: SelectionMask = serde_json::from_str(s)?;
        let d = mask.dimension();
        let mut seen = vec![false; d];
        for &i in &mask.kept_indices {
            if i >= d || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidConfig(format!(
                    "selection mask index {i} is out of range or repeated"
                )));
            }
        }
        Ok(mask)
    }
}

/// Keeps the `k` highest scores; ties go to the lower index. `k` larger than
/// the dimension is clamped.
pub fn select_top_k(scores: &[f64], k: usize) -> SelectionMask {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    let cmp = |a: &usize, b: &usize| scores[*b].total_cmp(&scores[*a]).then(a.cmp(b));
    let k = k.min(scores.len());
    if k > 0 && k < order.len() {
        order.select_nth_unstable_by(k - 1, cmp);
    }
    order.truncate(k);
    order.sort_by(cmp);
    SelectionMask {
        kept_indices: order,
        scores: scores.to_vec(),
    }
}

/// Per-feature z-scoring. Zero-variance columns are only centered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let dim = rows.first().map_or(0, Vec::len);
        let n = rows.len().max(1) as f64;
        let mut means = vec![0.0; dim];
        for r in rows {
            for (m, v) in means.iter_mut().zip(r) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut vars = vec![0.0; dim];
        for r in rows {
            for ((s, v), m) in vars.iter_mut().zip(r).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        let scales = vars
            .into_iter()
            .map(|v| {
                let sd = (v / n).sqrt();
                if sd > 0.0 && sd.is_finite() {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { means, scales }
    }

    pub fn identity(dimension: usize) -> Self {
        Standardizer {
            means: vec![0.0; dimension],
            scales: vec![1.0; dimension],
        }
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn transform_rows(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ManifestEntry;

    fn manifest(ids: &[&str]) -> CorpusManifest {
        CorpusManifest::new(
            ids.iter()
                .enumerate()
                .map(|(i, id)| ManifestEntry {
                    clip_id: id.to_string(),
                    label: if i % 2 == 0 {
                        Label::Deceptive
                    } else {
                        Label::Truthful
                    },
                    identity: format!("p{i}"),
                    source_video: "v.mp4".into(),
                    n_frames: 10,
                })
                .collect(),
        )
        .unwrap()
    }

    fn constant_block(name: &str, dim: usize, ids: &[&str]) -> FeatureBlock {
        FeatureBlock::from_rows(
            name,
            dim,
            ids.iter()
                .enumerate()
                .map(|(i, id)| (*id, vec![i as f64; dim])),
        )
        .unwrap()
    }

    #[test]
    fn fuse_est_me_is13_dimensions() {
        let ids = ["b", "a", "c"];
        let blocks = [
            constant_block("est", 49, &ids),
            constant_block("me", 88, &ids),
            constant_block("is13", 4366, &ids),
        ];
        let records = fuse(&blocks, &manifest(&ids)).unwrap();
        assert_eq!(records.len(), 3);
        assert!(records.iter().all(|r| r.features.len() == 4503));
        let order: Vec<_> = records.iter().map(|r| r.clip_id.as_str()).collect();
        assert_eq!(order, ["a", "b", "c"]);
    }

    #[test]
    fn fuse_single_block_is_identity() {
        let ids = ["x", "y"];
        let block =
            FeatureBlock::from_rows("me", 2, [("x", vec![1.0, 2.0]), ("y", vec![3.0, 4.0])])
                .unwrap();
        let records = fuse(std::slice::from_ref(&block), &manifest(&ids)).unwrap();
        for r in &records {
            assert_eq!(r.features, block.row(&r.clip_id).unwrap());
        }
    }

    #[test]
    fn fuse_missing_clip() {
        let block = constant_block("me", 3, &["a"]);
        let err = fuse(&[block], &manifest(&["a", "b"])).unwrap_err();
        assert!(matches!(err, Error::MissingClip { clip_id, .. } if clip_id == "b"));
    }

    #[test]
    fn ragged_row_rejected() {
        let mut block = FeatureBlock::new("me", 3);
        assert!(matches!(
            block.insert("a", vec![1.0]),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 1
            })
        ));
    }

    #[test]
    fn pearson_examples() {
        let labels = [
            Label::Deceptive,
            Label::Truthful,
            Label::Deceptive,
            Label::Truthful,
        ];
        let y: Vec<f64> = labels.iter().map(|l| l.as_u8() as f64).collect();
        let rows: Vec<Vec<f64>> = y.iter().map(|&v| vec![v, 1.0 - v, 5.0]).collect();
        let s = pearson_scores_matrix(&rows, &labels).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-15);
        assert!((s[1] - 1.0).abs() < 1e-15);
        assert_eq!(s[2], 0.0);
    }

    #[test]
    fn pearson_degenerate_labels() {
        let rows = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            pearson_scores_matrix(&rows, &[Label::Truthful, Label::Truthful]),
            Err(Error::DegenerateLabels)
        ));
    }

    #[test]
    fn anova_orders_like_pearson_for_two_classes() {
        let labels = [
            Label::Deceptive,
            Label::Truthful,
            Label::Deceptive,
            Label::Truthful,
            Label::Truthful,
        ];
        let rows = vec![
            vec![1.0, 0.3, 2.0],
            vec![0.2, 0.1, 2.0],
            vec![0.9, 0.5, 2.0],
            vec![0.1, 0.6, 2.0],
            vec![0.3, 0.2, 2.0],
        ];
        let f = anova_f_scores(&rows, &labels).unwrap();
        let p = pearson_scores_matrix(&rows, &labels).unwrap();
        assert!(f[0] > f[1]);
        assert!(p[0] > p[1]);
        assert_eq!(f[2], 0.0);
    }

    #[test]
    fn ratio_defaults() {
        assert_eq!(k_for_ratio(4503, 0.1), 450);
        assert_eq!(k_for_ratio(49, 0.1), 5);
        assert_eq!(k_for_ratio(3, 0.1), 1);
        assert_eq!(k_for_ratio(10, 1.0), 10);
    }

    #[test]
    fn select_examples() {
        let mask = select_top_k(&[0.9, 0.9, 0.1], 1);
        assert_eq!(mask.kept_indices, vec![0]);
        let mask = select_top_k(&[0.2, 0.5, 0.1], 3);
        assert_eq!(mask.kept_indices, vec![1, 0, 2]);
        assert_eq!(mask.sorted_indices(), vec![0, 1, 2]);
        assert_eq!(mask.apply(&[7.0, 8.0, 9.0]), vec![7.0, 8.0, 9.0]);
    }

    #[test]
    fn mask_json_round_trip_and_validation() {
        let mask = select_top_k(&[0.3, 0.7, 0.5, 0.1], 2);
        let back = SelectionMask::from_json(&mask.to_json().unwrap()).unwrap();
        assert_eq!(back, mask);
        assert!(SelectionMask::from_json(r#"{"kept_indices":[0,0],"scores":[1.0,2.0]}"#).is_err());
        assert!(SelectionMask::from_json(r#"{"kept_indices":[5],"scores":[1.0]}"#).is_err());
    }

    #[test]
    fn standardizer_handles_constant_columns() {
        let rows = vec![vec![1.0, 3.0], vec![3.0, 3.0]];
        let s = Standardizer::fit(&rows);
        assert_eq!(s.transform(&[1.0, 3.0]), vec![-1.0, 0.0]);
        assert_eq!(s.transform(&[3.0, 4.0]), vec![1.0, 1.0]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn labelled_rows() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<Label>)> {
            (4usize..30, 1usize..6).prop_flat_map(|(n, d)| {
                (
                    prop::collection::vec(prop::collection::vec(-100.0f64..100.0, d), n),
                    prop::collection::vec(prop::bool::ANY, n),
                )
                    .prop_map(|(rows, bits)| {
                        let mut labels: Vec<Label> = bits
                            .into_iter()
                            .map(|b| if b { Label::Deceptive } else { Label::Truthful })
                            .collect();
                        labels[0] = Label::Deceptive;
                        labels[1] = Label::Truthful;
                        (rows, labels)
                    })
            })
        }

        proptest! {
            #[test]
            fn pearson_affine_invariant((rows, labels) in labelled_rows(), scale in 0.01f64..100.0, shift in -50.0f64..50.0, flip in prop::bool::ANY) {
                let base = pearson_scores_matrix(&rows, &labels).unwrap();
                let sign = if flip { -1.0 } else { 1.0 };
                let moved: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| sign * scale * v + shift).collect()).collect();
                let after = pearson_scores_matrix(&moved, &labels).unwrap();
                for (a, b) in base.iter().zip(&after) {
                    prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
                }
            }

            #[test]
            fn mask_then_fuse_equals_fuse_then_mask(
                dims in prop::collection::vec(1usize..6, 1..4),
                seed_scores in prop::collection::vec(0.0f64..1.0, 20),
                k in 1usize..20,
            ) {
                let ids = ["a", "b", "c"];
                let blocks: Vec<FeatureBlock> = dims.iter().enumerate().map(|(bi, &d)| {
                    FeatureBlock::from_rows(format!("b{bi}"), d, ids.iter().enumerate().map(|(ci, id)| {
                        (*id, (0..d).map(|j| (100 * bi + 10 * ci + j) as f64).collect())
                    })).unwrap()
                }).collect();
                let total: usize = dims.iter().sum();
                let mask = select_top_k(&seed_scores[..total.min(20)].iter().chain(std::iter::repeat(&0.5)).take(total).copied().collect::<Vec<_>>(), k);
                let m = manifest(&ids);

                let fused_then_masked: Vec<Vec<f64>> = fuse(&blocks, &m).unwrap().iter().map(|r| mask.apply(&r.features)).collect();

                let parts = mask.split_by_blocks(&dims);
                let masked_blocks: Vec<FeatureBlock> = blocks.iter().zip(&parts).map(|(b, keep)| {
                    FeatureBlock::from_rows(b.name.clone(), keep.len(), b.rows().map(|(id, row)| {
                        (id.to_string(), keep.iter().map(|&i| row[i]).collect())
                    })).unwrap()
                }).collect();
                let masked_then_fused: Vec<Vec<f64>> = fuse(&masked_blocks, &m).unwrap().into_iter().map(|r| r.features).collect();
                prop_assert_eq!(fused_then_masked, masked_then_fused);
            }
        }
    }
}
