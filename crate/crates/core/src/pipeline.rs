//! End-to-end runs: parse, profile, cleanse, build the dataset, sample,
//! split, optionally search, train, evaluate against baselines, and write
//! every artifact with its provenance.
//!
//! All output except the `generated_at` field of the report is a pure
//! function of the corpus bytes and the configuration.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{classify_batch, LinkingConfig, RandomBaseline, Scoring, SdTypeStatistics};
use crate::cleansing::{cleanse_quads, CleansingReport, UndefinedPolicy};
use crate::dataset::{
    build_event_dataset, build_genre_datasets, sample, split_train_test, write_dataset, DatasetFile, DatasetSplit,
    GenreList, LabeledDataset, LabeledInstance, PageIndex, SamplingStrategy, Task, OTHER,
};
use crate::error::{Error, Result};
use crate::eval::{evaluate, format_table, paired_ttest, EvaluationReport, ReportProvenance, TTest};
use crate::ingest::{
    assemble_nodes, open_corpus, profile_corpus, CorpusStats, ErrorPolicy, ParseReport, Quad, QuadReader, SuffixList,
};
use crate::learn::{random_search, Algorithm, Hyperparameters, Model, SearchOutcome};
use crate::vocab::Vocabulary;

pub const REPORT_FILE: &str = "report.json";
pub const REPORT_TABLE_FILE: &str = "report.txt";
pub const MODEL_FILE: &str = "model.json";
pub const DATASET_FILE: &str = "dataset.jsonl";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineKind {
    Random,
    Sdtype,
    Kgb,
}

fn default_top_k() -> usize {
    7
}
fn default_split() -> f64 {
    0.8
}
fn default_baselines() -> Vec<BaselineKind> {
    vec![BaselineKind::Random, BaselineKind::Sdtype]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub output_dir: PathBuf,
    pub task: Task,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    #[serde(default)]
    pub strategy: SamplingStrategy,
    /// Per-class cap; the smallest class size when unset.
    #[serde(default)]
    pub cap: Option<usize>,
    #[serde(default = "default_split")]
    pub split_ratio: f64,
    #[serde(default)]
    pub seed: u64,
    pub algorithm: Algorithm,
    /// Fixed hyperparameters; when unset, `search_trials` random-search
    /// trials pick them (or the algorithm defaults when that is 0).
    #[serde(default)]
    pub hyperparameters: Option<Hyperparameters>,
    #[serde(default)]
    pub search_trials: usize,
    #[serde(default = "default_baselines")]
    pub baselines: Vec<BaselineKind>,
    #[serde(default)]
    pub policy: UndefinedPolicy,
    /// Fixture file for the entity-linking baseline.
    #[serde(default)]
    pub kgb_fixtures: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: PipelineConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(Error::Invalid(format!("split_ratio {} outside (0, 1)", self.split_ratio)));
        }
        if self.cap == Some(0) {
            return Err(Error::Invalid("cap must be at least 1".into()));
        }
        if let Some(h) = &self.hyperparameters {
            if h.algorithm() != self.algorithm {
                return Err(Error::Invalid(format!(
                    "hyperparameters are for {}, algorithm is {}",
                    h.algorithm(),
                    self.algorithm
                )));
            }
        }
        if self.baselines.contains(&BaselineKind::Kgb) && self.kgb_fixtures.is_none() {
            log::warn!("the kgb baseline will query the live entity-linking endpoint");
        }
        Ok(())
    }

    /// Human-readable list of the stages a run would execute.
    pub fn plan(&self) -> Vec<String> {
        let mut p = vec![
            format!("parse {} (skip malformed lines)", self.input.display()),
            format!("profile nodes under {}", self.task.root_type()),
            format!("cleanse (undefined terms: {})", serde_json::to_value(self.policy).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()),
            match &self.task {
                Task::Events => format!("build event dataset: top {} subtypes + Other, cap {}", self.top_k, cap_text(self.cap)),
                Task::Genre(g) => format!("build genre dataset for {g} among the top {} genres, cap {}", self.top_k, cap_text(self.cap)),
            },
            format!("sample ({}) with seed {}", self.strategy, self.seed),
            format!("split {:.0}/{:.0} per class", self.split_ratio * 100.0, (1.0 - self.split_ratio) * 100.0),
        ];
        match (&self.hyperparameters, self.search_trials) {
            (Some(h), _) => p.push(format!("train {} with fixed {h:?}", self.algorithm)),
            (None, 0) => p.push(format!("train {} with default hyperparameters", self.algorithm)),
            (None, n) => {
                p.push(format!("random search: {n} trials for {}", self.algorithm));
                p.push(format!("train {} with the best trial", self.algorithm));
            }
        }
        let names: Vec<String> = self.baselines.iter().map(|b| format!("{b:?}").to_lowercase()).collect();
        p.push(format!("evaluate model and baselines [{}]", names.join(", ")));
        p.push(format!(
            "write {}/{{{DATASET_FILE}, {MODEL_FILE}, {REPORT_FILE}, {REPORT_TABLE_FILE}}}",
            self.output_dir.display()
        ));
        p
    }
}

fn cap_text(cap: Option<usize>) -> String {
    cap.map_or_else(|| "auto".to_string(), |c| c.to_string())
}

/// Hex SHA-256 of a file's bytes.
pub fn sha256_file(path: &Path) -> Result<String> {
    let mut f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex::encode(h.finalize()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub task: Task,
    pub classes: Vec<String>,
    pub cap: usize,
    pub train: usize,
    pub test: usize,
    pub distinct_plds: usize,
    pub file: InputFile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemResult {
    pub system: String,
    pub report: EvaluationReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Significance {
    pub system: String,
    pub baseline: String,
    /// Paired over per-class F1.
    pub ttest: TTest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Seconds since the Unix epoch; the only non-deterministic field.
    pub generated_at: u64,
    pub config: serde_json::Value,
    pub inputs: Vec<InputFile>,
    pub vocabulary: String,
    pub public_suffix_list: String,
    pub parse: ParseReport,
    pub profile: CorpusStats,
    pub cleansing: CleansingReport,
    pub dataset: DatasetSummary,
    pub search: Option<SearchOutcome>,
    pub model: InputFile,
    pub hyperparameters: Hyperparameters,
    pub results: Vec<SystemResult>,
    pub significance: Vec<Significance>,
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage(name))
}

/// Labeled dataset for `task`: the top `top_k` event subtypes plus Other, or
/// one genre (which must be among the top `top_k` genres) against Other.
pub fn build_task_dataset(
    pages: &PageIndex,
    vocab: &Vocabulary,
    task: &Task,
    top_k: usize,
    cap: Option<usize>,
) -> Result<LabeledDataset> {
    match task {
        Task::Events => Ok(build_event_dataset(pages, vocab, top_k, cap)?.0),
        Task::Genre(g) => {
            let mut all = build_genre_datasets(pages, vocab, GenreList::bundled(), top_k, cap)?;
            let names: Vec<String> = all.keys().cloned().collect();
            all.remove(g)
                .ok_or_else(|| Error::Dataset(format!("genre {g:?} is not among the top {top_k} genres {names:?}")))
        }
    }
}

/// Parse a corpus file, skipping and counting malformed lines.
pub fn read_quads(path: &Path) -> Result<(Vec<Quad>, ParseReport)> {
    let mut reader = QuadReader::new(open_corpus(path)?, ErrorPolicy::SkipAndCount);
    let quads = reader.by_ref().collect::<Result<Vec<_>>>()?;
    let report = reader.into_report();
    if report.skipped > 0 {
        log::warn!("{}: skipped {} malformed lines", path.display(), report.skipped);
    }
    Ok((quads, report))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Predicted test labels of one baseline, named per system. The linking
/// baseline yields a generous and a strict system.
#[allow(clippy::too_many_arguments)]
pub fn baseline_predictions(
    kind: BaselineKind,
    train: &[LabeledInstance],
    test: &[LabeledInstance],
    classes: &[String],
    vocab: &Vocabulary,
    task: &Task,
    seed: u64,
    linking: &LinkingConfig,
) -> Result<Vec<(String, Vec<String>)>> {
    Ok(match kind {
        BaselineKind::Random => vec![("random".into(), RandomBaseline::new(classes, seed)?.predict_n(test.len()))],
        BaselineKind::Sdtype => {
            let sd = SdTypeStatistics::train(train, classes, vocab, task)?;
            vec![("sdtype".into(), test.iter().map(|i| sd.predict(i.node(), vocab).to_string()).collect())]
        }
        BaselineKind::Kgb => {
            let client = linking.client()?;
            let nodes: Vec<_> = test.iter().map(|i| i.node()).collect();
            let batch = classify_batch(&nodes, client.as_ref(), linking, task)?;
            if batch.skipped > 0 {
                log::warn!("kgb: {} nodes skipped after retries", batch.skipped);
            }
            [("kgb", Scoring::Generous), ("kgb-strict", Scoring::Strict)]
                .into_iter()
                .map(|(name, scoring)| {
                    let predicted = batch
                        .decisions
                        .iter()
                        .zip(test)
                        .map(|(d, i)| match d {
                            Some(d) => d.label(&i.label, scoring),
                            None => OTHER.to_string(),
                        })
                        .collect();
                    (name.to_string(), predicted)
                })
                .collect()
        }
    })
}

fn evaluate_baselines(
    cfg: &PipelineConfig,
    split: &DatasetSplit,
    classes: &[String],
    gold: &[String],
    vocab: &Vocabulary,
    provenance: &ReportProvenance,
) -> Result<Vec<SystemResult>> {
    let linking = LinkingConfig {
        fixtures: cfg.kgb_fixtures.clone(),
        ..LinkingConfig::default()
    };
    let mut out = Vec::new();
    for &kind in &cfg.baselines {
        for (system, predicted) in
            baseline_predictions(kind, &split.train, &split.test, classes, vocab, &cfg.task, cfg.seed, &linking)?
        {
            let mut report = evaluate(&predicted, gold, classes)?;
            report.provenance = ReportProvenance {
                model: system.clone(),
                ..provenance.clone()
            };
            out.push(SystemResult { system, report });
        }
    }
    Ok(out)
}

/// Execute the whole pipeline and write its artifacts.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunReport> {
    stage("config", cfg.validate())?;
    let vocab = Vocabulary::bundled();
    let suffixes = SuffixList::bundled();
    let corpus_hash = stage("parse", sha256_file(&cfg.input))?;

    let (quads, parse) = stage("parse", read_quads(&cfg.input))?;

    let raw_nodes = assemble_nodes(quads.iter().cloned(), suffixes);
    let profile = stage("profile", profile_corpus(&raw_nodes, Some(cfg.task.root_type()), vocab))?;
    drop(raw_nodes);

    let cleansed = cleanse_quads(quads, vocab, cfg.policy);
    let pages = PageIndex::build(assemble_nodes(cleansed.quads, suffixes));

    let dataset = stage("build-dataset", build_task_dataset(&pages, vocab, &cfg.task, cfg.top_k, cfg.cap))?;
    let sampled = stage("sample", sample(&dataset, cfg.strategy, cfg.seed))?;
    let mut split = stage("split", split_train_test(&sampled, cfg.split_ratio, cfg.seed))?;
    split.provenance.strategy = Some(cfg.strategy);
    split.provenance.vocabulary = vocab.version().to_string();
    let classes = split.classes();

    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::io(&cfg.output_dir, e))?;
    let dataset_path = cfg.output_dir.join(DATASET_FILE);
    stage("build-dataset", write_dataset(&dataset_path, &DatasetFile::from_split(&split)))?;
    let dataset_hash = sha256_file(&dataset_path)?;

    let search = match (&cfg.hyperparameters, cfg.search_trials) {
        (None, n) if n > 0 => Some(stage(
            "search",
            random_search(cfg.algorithm, &split.train, &classes, vocab, &cfg.task, n, cfg.seed),
        )?),
        _ => None,
    };
    let hyperparameters = cfg
        .hyperparameters
        .or(search.as_ref().map(|s| s.best))
        .unwrap_or_else(|| Hyperparameters::default_for(cfg.algorithm));

    let model = stage(
        "train",
        Model::train(&split.train, &classes, vocab, &cfg.task, hyperparameters, cfg.seed, dataset_hash.clone()),
    )?;
    let model_path = cfg.output_dir.join(MODEL_FILE);
    stage("train", model.save(&model_path))?;

    let gold: Vec<String> = split.test.iter().map(|i| i.label.clone()).collect();
    let provenance = ReportProvenance {
        model: cfg.algorithm.to_string(),
        dataset: dataset_hash.clone(),
        seed: cfg.seed,
    };
    let predicted = stage("evaluate", model.predict_instances(&split.test, vocab))?;
    let mut report = stage("evaluate", evaluate(&predicted, &gold, &classes))?;
    report.provenance = provenance.clone();
    let mut results = vec![SystemResult {
        system: cfg.algorithm.to_string(),
        report,
    }];
    results.extend(stage("evaluate", evaluate_baselines(cfg, &split, &classes, &gold, vocab, &provenance))?);

    let main_f1: Vec<f64> = results[0].report.per_class.iter().map(|m| m.f1).collect();
    let significance = results[1..]
        .iter()
        .filter_map(|r| {
            let f1: Vec<f64> = r.report.per_class.iter().map(|m| m.f1).collect();
            paired_ttest(&main_f1, &f1).ok().map(|ttest| Significance {
                system: results[0].system.clone(),
                baseline: r.system.clone(),
                ttest,
            })
        })
        .collect();

    let mut config = serde_json::to_value(cfg)?;
    if let Some(o) = config.as_object_mut() {
        o.remove("output_dir");
    }
    let run = RunReport {
        generated_at: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        config,
        inputs: vec![InputFile {
            path: cfg.input.display().to_string(),
            sha256: corpus_hash,
        }],
        vocabulary: vocab.version().to_string(),
        public_suffix_list: suffixes.version().to_string(),
        parse,
        profile,
        cleansing: cleansed.report,
        dataset: DatasetSummary {
            task: cfg.task.clone(),
            classes: classes.clone(),
            cap: sampled.cap,
            train: split.train.len(),
            test: split.test.len(),
            distinct_plds: sampled.distinct_plds(),
            file: InputFile {
                path: DATASET_FILE.to_string(),
                sha256: dataset_hash,
            },
        },
        search,
        model: InputFile {
            path: MODEL_FILE.to_string(),
            sha256: sha256_file(&model_path)?,
        },
        hyperparameters,
        results,
        significance,
    };
    write_json(&cfg.output_dir.join(REPORT_FILE), &run)?;
    let rows: Vec<(String, String, &EvaluationReport)> = run
        .results
        .iter()
        .map(|r| (r.system.clone(), cfg.task.to_string(), &r.report))
        .collect();
    let table_path = cfg.output_dir.join(REPORT_TABLE_FILE);
    std::fs::write(&table_path, format_table(&rows)).map_err(|e| Error::io(&table_path, e))?;
    Ok(run)
}

/// The report with its timestamp removed, for reproducibility checks.
pub fn report_without_timestamp(report_json: &str) -> Result<serde_json::Value> {
    let mut v: serde_json::Value = serde_json::from_str(report_json)?;
    if let Some(o) = v.as_object_mut() {
        o.remove("generated_at");
    }
    Ok(v)
}
