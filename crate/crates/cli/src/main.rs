//! `est`: synthetic corpora, EST extraction, fusion, selection and the
//! repeated cross-validation protocol from one binary.
//!
//! Exit codes: 0 success, 2 bad input or configuration, 3 evaluation failure.
//! Every command computes all of its outputs before writing any of them and
//! writes each file atomically, so a failed run leaves nothing behind.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use est_core::corpus::{self, Corpus};
use est_core::eval::{self, EvalReport, FoldStrategy, PipelineConfig, SelectionSize, TrialsConfig};
use est_core::extract::{aggregate_report, est_block, revise_corpus, EST_BLOCK};
use est_core::fusion::{fuse, select_top_k, FeatureBlock, FeatureRecord, SelectionMethod};
use est_core::learners::{LearnerKind, LearnerSpec};
use est_core::synth::{synth_corpus, SynthConfig};
use est_core::Error;

#[derive(Parser)]
#[command(
    name = "est",
    version,
    about = "Emotion state transition features and deception classifier evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Generate a synthetic corpus from class-conditional emotion Markov chains.
    Synth(SynthArgs),
    /// Revise visual tracks with audio and write the 49-dim EST block.
    Extract(CorpusArgs),
    /// Concatenate feature blocks into one fused-features file.
    Fuse(FeatureArgs),
    /// Rank fused features by relevance to the label and keep the top ones.
    Select(SelectArgs),
    /// Run repeated K-fold cross-validation for the chosen classifiers.
    Evaluate(EvaluateArgs),
    /// Per-class emotion distribution and EST aggregates.
    Report(CorpusArgs),
}

#[derive(Args, Serialize)]
struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON file with a full generator configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    clips_per_class: Option<usize>,
    #[arg(long)]
    frames_min: Option<usize>,
    #[arg(long)]
    frames_max: Option<usize>,
    /// 0 gives both classes the same chain.
    #[arg(long)]
    separation: Option<f64>,
    #[arg(long)]
    audio_noise: Option<f64>,
    #[arg(long)]
    identities: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    out_dir: PathBuf,
}

#[derive(Args, Serialize)]
struct CorpusArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    visual: PathBuf,
    /// Optional; without it tracks are revised from the visual labels alone.
    #[arg(long)]
    audio: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    out_dir: PathBuf,
}

#[derive(Args, Serialize, Clone)]
struct FeatureArgs {
    /// Pre-fused features (`clip_id,label,f_0,...`); replaces the options below.
    #[arg(long, conflicts_with_all = ["manifest", "visual", "audio", "aux", "blocks"])]
    fused: Option<PathBuf>,
    #[arg(long, required_unless_present = "fused")]
    manifest: Option<PathBuf>,
    /// Needed only when `est` is listed in --blocks without an --aux file.
    #[arg(long)]
    visual: Option<PathBuf>,
    #[arg(long)]
    audio: Option<PathBuf>,
    /// Auxiliary block as `name=path`; repeatable.
    #[arg(long, value_parser = parse_aux)]
    aux: Vec<(String, PathBuf)>,
    /// Block names in fusion order.
    #[arg(long, value_delimiter = ',', default_value = "est")]
    blocks: Vec<String>,
    #[arg(long)]
    #[serde(skip)]
    out_dir: PathBuf,
}

#[derive(Args, Serialize, Clone, Copy)]
struct SelectionArgs {
    /// Fraction of features to keep.
    #[arg(long, conflicts_with = "select_k")]
    select_ratio: Option<f64>,
    /// Number of features to keep.
    #[arg(long)]
    select_k: Option<usize>,
    /// Keep every feature.
    #[arg(long, conflicts_with_all = ["select_ratio", "select_k"])]
    no_select: bool,
    #[arg(long, value_enum, default_value_t = Method::Pearson)]
    method: Method,
}

impl SelectionArgs {
    fn size(&self) -> SelectionSize {
        match (self.no_select, self.select_k, self.select_ratio) {
            (true, _, _) => SelectionSize::All,
            (_, Some(k), _) => SelectionSize::TopK(k),
            (_, _, Some(r)) => SelectionSize::Ratio(r),
            _ => SelectionSize::Ratio(0.1),
        }
    }

    fn validate(&self) -> Result<(), Error> {
        match self.size() {
            SelectionSize::Ratio(r) if !(r > 0.0 && r <= 1.0) => Err(Error::InvalidConfig(
                format!("--select-ratio must lie in (0, 1], got {r}"),
            )),
            SelectionSize::TopK(0) => {
                Err(Error::InvalidConfig("--select-k must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(ValueEnum, Serialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum Method {
    Pearson,
    Anova,
}

impl From<Method> for SelectionMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Pearson => SelectionMethod::Pearson,
            Method::Anova => SelectionMethod::Anova,
        }
    }
}

#[derive(Args, Serialize)]
struct SelectArgs {
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    selection: SelectionArgs,
}

#[derive(Args, Serialize)]
struct EvaluateArgs {
    #[command(flatten)]
    features: FeatureArgs,
    #[command(flatten)]
    selection: SelectionArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Fit the selection once on all clips instead of per training fold.
    #[arg(long)]
    select_global: bool,
    /// Keep every clip of one identity inside a single fold.
    #[arg(long)]
    identity_grouped: bool,
    /// Plain shuffled folds instead of the default stratified ones.
    #[arg(long, conflicts_with = "identity_grouped")]
    unstratified: bool,
    #[arg(long)]
    no_standardize: bool,
    /// Comma-separated: linear_svm, decision_tree, random_forest, knn,
    /// logistic_regression (or L-SVM, DT, RF, kNN, LR).
    #[arg(
        long,
        value_delimiter = ',',
        value_parser = parse_classifier,
        default_value = "linear_svm,decision_tree,random_forest,knn,logistic_regression"
    )]
    classifiers: Vec<LearnerKind>,
}

fn parse_aux(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => {
            Ok((name.to_string(), PathBuf::from(path)))
        }
        _ => Err(format!("expected name=path, got `{s}`")),
    }
}

fn parse_classifier(s: &str) -> Result<LearnerKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Output files of one command, written only after everything succeeded.
struct Outputs {
    dir: PathBuf,
    config: serde_json::Value,
    config_hash: String,
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn new(dir: &Path, command: &Command) -> Result<Self, Error> {
        let config = serde_json::json!({
            "tool": "est",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
        });
        let config_hash = eval::hash_hex(config.to_string().as_bytes());
        Ok(Outputs {
            dir: dir.to_path_buf(),
            config,
            config_hash,
            files: Vec::new(),
        })
    }

    fn add(&mut self, name: &str, contents: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), contents.into()));
    }

    /// Writes every file plus `provenance.json`, which names the config
    /// hash and the SHA-256 of each file.
    fn commit(mut self) -> Result<(), Error> {
        let listing: serde_json::Map<String, serde_json::Value> = self
            .files
            .iter()
            .map(|(name, bytes)| {
                (
                    name.clone(),
                    serde_json::Value::String(eval::hash_hex(bytes)),
                )
            })
            .collect();
        let provenance = serde_json::json!({
            "config_hash": self.config_hash,
            "config": self.config,
            "files": listing,
        });
        let mut text = serde_json::to_string_pretty(&provenance)?;
        text.push('\n');
        self.add("provenance.json", text);
        for (name, bytes) in &self.files {
            corpus::write_atomic(&self.dir.join(name), bytes)?;
        }
        Ok(())
    }
}

fn load(args: &CorpusArgs) -> Result<Corpus, Error> {
    corpus::load_corpus(&args.manifest, &args.visual, args.audio.as_deref(), &[])
}

fn cmd_synth(args: &SynthArgs, mut out: Outputs) -> Result<(), Error> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            serde_json::from_str(&text)?
        }
        None => SynthConfig::default(),
    };
    config.seed = args.seed;
    let overrides = [
        (args.clips_per_class, &mut config.n_clips_per_class),
        (args.frames_min, &mut config.frames_min),
        (args.frames_max, &mut config.frames_max),
        (args.identities, &mut config.n_identities),
    ];
    for (value, field) in overrides {
        if let Some(v) = value {
            *field = v;
        }
    }
    if let Some(s) = args.separation {
        config.separation = s;
    }
    if let Some(p) = args.audio_noise {
        config.audio_noise = p;
    }
    let corpus = synth_corpus(&config)?;
    out.add("manifest.csv", corpus::manifest_csv(&corpus.manifest));
    out.add(
        "visual_states.csv",
        corpus::tracks_csv(corpus.visual.values(), est_core::Modality::Visual),
    );
    out.add(
        "audio_states.csv",
        corpus::tracks_csv(corpus.audio.values(), est_core::Modality::Audio),
    );
    let mut json = serde_json::to_string_pretty(&config)?;
    json.push('\n');
    out.add("synth_config.json", json);
    eprintln!(
        "synthesized {} clips into {}",
        corpus.manifest.len(),
        out.dir.display()
    );
    out.commit()
}

fn cmd_extract(args: &CorpusArgs, mut out: Outputs) -> Result<(), Error> {
    let corpus = load(args)?;
    let revised = revise_corpus(&corpus)?;
    let block = est_block(&revised);
    let report = aggregate_report(&corpus, &revised);
    out.add("est.csv", corpus::block_csv(&block));
    out.add("aggregate.csv", report.to_csv());
    eprintln!(
        "EST for {} clips ({} with audio)",
        block.len(),
        corpus.audio.len()
    );
    out.commit()
}

fn cmd_report(args: &CorpusArgs, mut out: Outputs) -> Result<(), Error> {
    let corpus = load(args)?;
    let report = aggregate_report(&corpus, &revise_corpus(&corpus)?);
    out.add("aggregate.csv", report.to_csv());
    print!("{}", report.top_table(5));
    out.commit()
}

/// `(block, dimension)` in column order.
type Layout = Vec<(String, usize)>;

/// Fused records plus their block layout.
fn resolve_features(args: &FeatureArgs) -> Result<(Vec<FeatureRecord>, Layout), Error> {
    if let Some(path) = &args.fused {
        let records = corpus::read_fused(path)?;
        let dim = records.first().map_or(0, |r| r.features.len());
        return Ok((records, vec![("fused".into(), dim)]));
    }
    let manifest_path = args
        .manifest
        .as_ref()
        .expect("clap requires --manifest without --fused");
    let needs_est =
        args.blocks.iter().any(|b| b == EST_BLOCK) && !args.aux.iter().any(|(n, _)| n == EST_BLOCK);
    let corpus = match (&args.visual, needs_est) {
        (Some(visual), _) => {
            corpus::load_corpus(manifest_path, visual, args.audio.as_deref(), &args.aux)?
        }
        (None, true) => {
            return Err(Error::InvalidConfig(
                "block `est` needs --visual (or --aux est=PATH from `est extract`)".into(),
            ))
        }
        (None, false) => {
            let manifest = corpus::read_manifest(manifest_path)?;
            let blocks = args
                .aux
                .iter()
                .map(|(name, path)| corpus::read_block(path, name))
                .collect::<Result<Vec<_>, _>>()?;
            Corpus {
                manifest,
                visual: Default::default(),
                audio: Default::default(),
                blocks,
            }
        }
    };
    let computed_est = if needs_est {
        Some(est_block(&revise_corpus(&corpus)?))
    } else {
        None
    };
    let mut seen = std::collections::HashSet::new();
    let mut blocks: Vec<FeatureBlock> = Vec::new();
    for name in &args.blocks {
        if !seen.insert(name) {
            return Err(Error::InvalidConfig(format!("block `{name}` listed twice")));
        }
        let block = corpus
            .block(name)
            .or(computed_est.as_ref().filter(|_| name == EST_BLOCK))
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "no source for block `{name}`; pass --aux {name}=PATH"
                ))
            })?;
        blocks.push(block.clone());
    }
    let dims = blocks
        .iter()
        .map(|b| (b.name.clone(), b.dimension()))
        .collect();
    Ok((fuse(&blocks, &corpus.manifest)?, dims))
}

fn cmd_fuse(args: &FeatureArgs, mut out: Outputs) -> Result<(), Error> {
    let (records, dims) = resolve_features(args)?;
    out.add("fused.csv", corpus::fused_csv(&records));
    let total: usize = dims.iter().map(|d| d.1).sum();
    eprintln!(
        "fused {} clips x {total} features from {:?}",
        records.len(),
        dims
    );
    out.commit()
}

fn cmd_select(args: &SelectArgs, mut out: Outputs) -> Result<(), Error> {
    args.selection.validate()?;
    let (records, dims) = resolve_features(&args.features)?;
    let rows: Vec<Vec<f64>> = records.iter().map(|r| r.features.clone()).collect();
    let labels: Vec<_> = records.iter().map(|r| r.label).collect();
    let dim = rows.first().map_or(0, Vec::len);
    let scores = SelectionMethod::from(args.selection.method).scores(&rows, &labels)?;
    let mask = select_top_k(&scores, args.selection.size().resolve(dim));
    let per_block = mask.split_by_blocks(&dims.iter().map(|d| d.1).collect::<Vec<_>>());
    let summary = serde_json::json!({
        "config_hash": out.config_hash,
        "dimension": dim,
        "k": mask.k(),
        "per_block": dims.iter().zip(&per_block).map(|((name, _), kept)| (name.clone(), kept.len().into())).collect::<serde_json::Map<String, serde_json::Value>>(),
        "mask": serde_json::from_str::<serde_json::Value>(&mask.to_json()?)?,
    });
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    out.add("selection.json", text);
    let selected: Vec<FeatureRecord> = records
        .iter()
        .map(|r| FeatureRecord {
            features: mask.apply(&r.features),
            ..r.clone()
        })
        .collect();
    out.add("selected.csv", corpus::fused_csv(&selected));
    eprintln!("kept {} of {dim} features", mask.k());
    out.commit()
}

fn cmd_evaluate(args: &EvaluateArgs, mut out: Outputs) -> Result<(), Error> {
    args.selection.validate()?;
    if args.folds < 2 {
        return Err(Error::InvalidConfig("--folds must be at least 2".into()));
    }
    if args.identity_grouped && args.features.fused.is_some() {
        return Err(Error::InvalidConfig(
            "--identity-grouped needs identities from a manifest; fused files carry none".into(),
        ));
    }
    if args.classifiers.is_empty() {
        return Err(Error::InvalidConfig("no classifiers selected".into()));
    }
    let (records, _) = resolve_features(&args.features)?;
    let config = TrialsConfig {
        k: args.folds,
        n_trials: args.trials,
        base_seed: args.seed,
        strategy: if args.identity_grouped {
            FoldStrategy::IdentityGrouped
        } else if args.unstratified {
            FoldStrategy::Shuffled
        } else {
            FoldStrategy::Stratified
        },
        pipeline: PipelineConfig {
            selection: args.selection.size(),
            method: args.selection.method.into(),
            select_global: args.select_global,
            standardize: !args.no_standardize,
        },
    };
    let mut reports = Vec::with_capacity(args.classifiers.len());
    for &kind in &args.classifiers {
        reports.push(eval::run_trials(
            &LearnerSpec::new(kind),
            &records,
            &config,
        )?);
    }
    let report = EvalReport::new(out.config.clone(), reports);
    let table = report.summary_table();
    out.add("report.json", report.to_json()?);
    out.add("folds.csv", report.folds_csv());
    out.add("confusion.csv", report.confusion_csv());
    out.add(
        "summary.txt",
        format!("config {}\n{table}", report.config_hash),
    );
    print!("{table}");
    out.commit()
}

fn run(cli: Cli) -> Result<(), Error> {
    let out_dir = match &cli.command {
        Command::Synth(a) => &a.out_dir,
        Command::Extract(a) | Command::Report(a) => &a.out_dir,
        Command::Fuse(a) => &a.out_dir,
        Command::Select(a) => &a.features.out_dir,
        Command::Evaluate(a) => &a.features.out_dir,
    };
    let out = Outputs::new(out_dir, &cli.command)?;
    match &cli.command {
        Command::Synth(a) => cmd_synth(a, out),
        Command::Extract(a) => cmd_extract(a, out),
        Command::Report(a) => cmd_report(a, out),
        Command::Fuse(a) => cmd_fuse(a, out),
        Command::Select(a) => cmd_select(a, out),
        Command::Evaluate(a) => cmd_evaluate(a, out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Evaluation { .. }) {
                3
            } else {
                2
            })
        }
    }
}
