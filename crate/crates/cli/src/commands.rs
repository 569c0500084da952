//! Subcommand implementations.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use markup_infer::baselines::LinkingConfig;
use markup_infer::cleansing::cleanse_quads;
use markup_infer::dataset::{
    read_dataset, sample, split_train_test, write_dataset, DatasetFile, DatasetSplit, LabeledDataset, PageIndex,
    Task, OTHER,
};
use markup_infer::eval::{evaluate, format_table, ReportProvenance};
use markup_infer::ingest::{assemble_nodes, profile_corpus, Quad, SuffixList, Term};
use markup_infer::learn::{random_search, Hyperparameters, Model};
use markup_infer::pipeline::{
    baseline_predictions, build_task_dataset, read_quads, run_pipeline, sha256_file, BaselineKind, PipelineConfig,
};
use markup_infer::synthetic::{generate, SyntheticCorpusSpec};
use markup_infer::vocab::Vocabulary;
use markup_infer::{RDF_TYPE, SCHEMA_NS};

use crate::{BaselineArg, Command, SampleArgs, ScoringArg, SyntheticKind};

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Profile { input, type_filter, out } => profile(&input, type_filter.as_deref(), out.as_deref()),
        Command::Cleanse {
            input,
            out,
            policy,
            report,
        } => cleanse(&input, &out, policy.into(), report.as_deref()),
        Command::BuildDataset {
            input,
            task,
            top_k,
            sample,
            policy,
            out,
        } => build_dataset(&input, &task, top_k, &sample, policy.into(), &out),
        Command::Sample { dataset, sample, out } => resample(&dataset, &sample, &out),
        Command::Search {
            dataset,
            algorithm,
            trials,
            seed,
            out,
        } => {
            let (split, _) = load_split(&dataset)?;
            let classes = split.classes();
            let outcome = random_search(algorithm, &split.train, &classes, Vocabulary::bundled(), &split.provenance.task, trials, seed)?;
            log::info!("best trial {} scored {:.4}", outcome.best_index, outcome.best_score);
            emit_json(&outcome.best, out.as_deref())?;
            Ok(())
        }
        Command::Train {
            dataset,
            algorithm,
            hyperparameters,
            trials,
            seed,
            out,
        } => {
            let (split, hash) = load_split(&dataset)?;
            let classes = split.classes();
            let vocab = Vocabulary::bundled();
            let task = &split.provenance.task;
            let hp = match (hyperparameters, trials) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    let hp: Hyperparameters =
                        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
                    if hp.algorithm() != algorithm {
                        bail!("{} holds {} hyperparameters, not {algorithm}", path.display(), hp.algorithm());
                    }
                    hp
                }
                (None, Some(n)) => random_search(algorithm, &split.train, &classes, vocab, task, n, seed)?.best,
                (None, None) => Hyperparameters::default_for(algorithm),
            };
            let model = Model::train(&split.train, &classes, vocab, task, hp, seed, hash)?;
            model.save(&out)?;
            eprintln!("wrote {} ({} classes, {} dimensions)", out.display(), classes.len(), model.feature_space.dim());
            Ok(())
        }
        Command::Evaluate { model, dataset, out } => {
            let m = Model::load(&model)?;
            let (split, hash) = load_split(&dataset)?;
            let predicted = m.predict_instances(&split.test, Vocabulary::bundled())?;
            let provenance = ReportProvenance {
                model: sha256_file(&model)?,
                dataset: hash,
                seed: m.provenance.seed,
            };
            report(m.algorithm.name(), &split, &m.classes, predicted, provenance, out.as_deref())
        }
        Command::Predict {
            model,
            input,
            policy,
            out,
        } => predict(&model, &input, policy.into(), out.as_deref()),
        Command::Baseline {
            kind,
            dataset,
            seed,
            fixtures,
            scoring,
            out,
        } => {
            let (split, hash) = load_split(&dataset)?;
            let classes = split.classes();
            let kind = match kind {
                BaselineArg::Random => BaselineKind::Random,
                BaselineArg::Sdtype => BaselineKind::Sdtype,
                BaselineArg::Kgb => BaselineKind::Kgb,
            };
            let linking = LinkingConfig {
                fixtures,
                ..LinkingConfig::default()
            };
            let systems = baseline_predictions(
                kind,
                &split.train,
                &split.test,
                &classes,
                Vocabulary::bundled(),
                &split.provenance.task,
                seed,
                &linking,
            )?;
            let wanted = match (kind, scoring) {
                (BaselineKind::Kgb, ScoringArg::Strict) => "kgb-strict",
                (BaselineKind::Kgb, ScoringArg::Generous) => "kgb",
                _ => "",
            };
            let (system, predicted) = systems
                .into_iter()
                .find(|(name, _)| wanted.is_empty() || name == wanted)
                .context("baseline produced no predictions")?;
            let provenance = ReportProvenance {
                model: system.clone(),
                dataset: hash,
                seed,
            };
            report(&system, &split, &classes, predicted, provenance, out.as_deref())
        }
        Command::GenSynthetic {
            kind,
            spec,
            nodes_per_class,
            signal,
            genres,
            seed,
            out,
            gold,
        } => {
            let spec = match spec {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str::<SyntheticCorpusSpec>(&text).with_context(|| format!("parsing {}", path.display()))?
                }
                None => match kind {
                    SyntheticKind::Events => SyntheticCorpusSpec::events(seed, nodes_per_class, signal),
                    SyntheticKind::Skewed => SyntheticCorpusSpec::skewed_events(seed, nodes_per_class),
                    SyntheticKind::Movies => {
                        let g: Vec<&str> = genres.iter().map(String::as_str).collect();
                        SyntheticCorpusSpec::movies(seed, &g, nodes_per_class, signal)
                    }
                },
            };
            let corpus = generate(&spec)?;
            corpus.write_nquads(create(&out)?)?;
            if let Some(g) = &gold {
                corpus.write_gold(create(g)?)?;
            }
            eprintln!("wrote {} quads for {} nodes to {}", corpus.quads.len(), corpus.gold.len(), out.display());
            Ok(())
        }
        Command::Run {
            config,
            input,
            output_dir,
            task,
            algorithm,
            strategy,
            cap,
            seed,
            trials,
            fixtures,
            dry_run,
        } => {
            let mut cfg = PipelineConfig::load(&config)?;
            if let Some(v) = input {
                cfg.input = v;
            }
            if let Some(v) = output_dir {
                cfg.output_dir = v;
            }
            if let Some(v) = task {
                cfg.task = v;
            }
            if let Some(v) = algorithm {
                if cfg.hyperparameters.is_some_and(|h| h.algorithm() != v) {
                    cfg.hyperparameters = None;
                }
                cfg.algorithm = v;
            }
            if let Some(v) = strategy {
                cfg.strategy = v;
            }
            if let Some(v) = cap {
                cfg.cap = v.0;
            }
            if let Some(v) = seed {
                cfg.seed = v;
            }
            if let Some(v) = trials {
                cfg.search_trials = v;
                cfg.hyperparameters = None;
            }
            if let Some(v) = fixtures {
                cfg.kgb_fixtures = Some(v);
            }
            cfg.validate()?;
            if dry_run {
                for (i, step) in cfg.plan().iter().enumerate() {
                    println!("{:>2}. {step}", i + 1);
                }
                return Ok(());
            }
            let run = run_pipeline(&cfg)?;
            for r in &run.results {
                println!("{:<12} macro F1 {:.4}", r.system, r.report.macro_f1);
            }
            eprintln!("artifacts in {}", cfg.output_dir.display());
            Ok(())
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

/// Pretty JSON to a file, or to stdout when no path is given.
fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => {
            let mut w = create(p)?;
            writeln!(w, "{text}")?;
            w.flush()?;
        }
        None => print_stdout(&format!("{text}\n"))?,
    }
    Ok(())
}

/// Write to stdout; a closed pipe (e.g. `| head`) is not an error.
fn print_stdout(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn load_split(path: &Path) -> Result<(DatasetSplit, String)> {
    let file = read_dataset(path)?;
    Ok((file.to_split()?, sha256_file(path)?))
}

fn report(
    system: &str,
    split: &DatasetSplit,
    classes: &[String],
    predicted: Vec<String>,
    provenance: ReportProvenance,
    out: Option<&Path>,
) -> Result<()> {
    let gold: Vec<String> = split.test.iter().map(|i| i.label.clone()).collect();
    let mut r = evaluate(&predicted, &gold, classes)?;
    r.provenance = provenance;
    match out {
        Some(p) => {
            emit_json(&r, Some(p))?;
            eprint!("{}", format_table(&[(system.to_string(), split.provenance.task.to_string(), &r)]));
        }
        None => print_stdout(&format_table(&[(system.to_string(), split.provenance.task.to_string(), &r)]))?,
    }
    Ok(())
}

fn schema_iri(t: &str) -> String {
    if t.contains("://") {
        t.to_string()
    } else {
        format!("{SCHEMA_NS}{t}")
    }
}

fn profile(input: &Path, type_filter: Option<&str>, out: Option<&Path>) -> Result<()> {
    let (quads, _) = read_quads(input)?;
    let nodes = assemble_nodes(quads, SuffixList::bundled());
    let filter = type_filter.map(schema_iri);
    let stats = profile_corpus(&nodes, filter.as_deref(), Vocabulary::bundled())?;
    emit_json(&stats, out)
}

fn cleanse(input: &Path, out: &Path, policy: markup_infer::cleansing::UndefinedPolicy, report: Option<&Path>) -> Result<()> {
    let (quads, _) = read_quads(input)?;
    let cleansed = cleanse_quads(quads, Vocabulary::bundled(), policy);
    let mut w = create(out)?;
    for q in &cleansed.quads {
        writeln!(w, "{}", q.to_nquads())?;
    }
    w.flush()?;
    match report {
        Some(p) => emit_json(&cleansed.report, Some(p)),
        None => {
            let r = &cleansed.report;
            eprintln!(
                "{} quads in, {} out: {} namespace fixes, {} casing fixes, {} dropped undefined",
                r.quads_in, r.quads_out, r.namespace_fixes, r.casing_fixes, r.dropped_undefined
            );
            Ok(())
        }
    }
}

fn sample_and_write(ds: &LabeledDataset, args: &SampleArgs, out: &Path) -> Result<()> {
    let vocab = Vocabulary::bundled();
    let sampled = sample(ds, args.strategy, args.seed)?;
    let mut split = split_train_test(&sampled, args.split_ratio, args.seed)?;
    split.provenance.strategy = Some(args.strategy);
    split.provenance.vocabulary = vocab.version().to_string();
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    write_dataset(out, &DatasetFile::from_split(&split))?;
    eprintln!(
        "wrote {}: {} classes x {} ({} train, {} test, {} plds, {})",
        out.display(),
        sampled.classes.len(),
        sampled.cap,
        split.train.len(),
        split.test.len(),
        sampled.distinct_plds(),
        args.strategy,
    );
    Ok(())
}

fn build_dataset(
    input: &Path,
    task: &Task,
    top_k: usize,
    args: &SampleArgs,
    policy: markup_infer::cleansing::UndefinedPolicy,
    out: &Path,
) -> Result<()> {
    let vocab = Vocabulary::bundled();
    let (quads, _) = read_quads(input)?;
    let cleansed = cleanse_quads(quads, vocab, policy);
    let pages = PageIndex::build(assemble_nodes(cleansed.quads, SuffixList::bundled()));
    let ds = build_task_dataset(&pages, vocab, task, top_k, args.cap.0)?;
    sample_and_write(&ds, args, out)
}

fn resample(dataset: &Path, args: &SampleArgs, out: &Path) -> Result<()> {
    let mut ds = read_dataset(dataset)?.to_dataset();
    ds.cap = match args.cap.0 {
        Some(c) => c,
        None => ds.classes.values().map(Vec::len).min().unwrap_or(0),
    };
    sample_and_write(&ds, args, out)
}

fn predict(model: &Path, input: &Path, policy: markup_infer::cleansing::UndefinedPolicy, out: Option<&Path>) -> Result<()> {
    let vocab = Vocabulary::bundled();
    let m = Model::load(model)?;
    let task = m.feature_space.task.clone();
    let (quads, _) = read_quads(input)?;
    let cleansed = cleanse_quads(quads, vocab, policy);
    let pages = PageIndex::build(assemble_nodes(cleansed.quads, SuffixList::bundled()));
    let root = task.root_type();

    let mut lines = String::new();
    let mut emitted = 0usize;
    for page in pages.pages() {
        for node in &page.nodes {
            if !node.types().any(|t| vocab.is_subtype(t, root).unwrap_or(false)) {
                continue;
            }
            let p = m.predict_node(node, &page.nodes, vocab)?;
            if p.label == OTHER {
                continue;
            }
            let q = match &task {
                Task::Events => Quad::new(node.subject.clone(), RDF_TYPE, Term::iri(schema_iri(&p.label)), &page.url),
                Task::Genre(_) => Quad::new(
                    node.subject.clone(),
                    markup_infer::dataset::GENRE_PREDICATE,
                    Term::literal(p.label.clone()),
                    &page.url,
                ),
            };
            lines.push_str(&q.to_nquads());
            lines.push('\n');
            emitted += 1;
        }
    }
    match out {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(lines.as_bytes())?;
            w.flush()?;
        }
        None => print_stdout(&lines)?,
    }
    log::info!("emitted {emitted} statements");
    Ok(())
}
