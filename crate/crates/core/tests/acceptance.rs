//! Acceptance suite: one test per criterion, each printing a single
//! `[PASS]`/`[FAIL]` line with its runtime against the budget.
//!
//! Lines go straight to the process's stderr so they show even when the
//! harness captures test output.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use statrs::distribution::{ContinuousCDF, StudentsT};

use markup_infer::baselines::RandomBaseline;
use markup_infer::cleansing::{cleanse_quads, UndefinedPolicy};
use markup_infer::dataset::{
    build_event_dataset, fair_share_allocation, sample, split_by_pld, LabeledDataset, LabeledInstance, Page,
    PageIndex, SamplingStrategy, Task,
};
use markup_infer::eval::{evaluate, paired_ttest};
use markup_infer::features::{FeatureBlocks, FeatureSpace, Matrix};
use markup_infer::ingest::{assemble_nodes, parse_nquads, ErrorPolicy, NodeRecord, Quad, Statement, SuffixList, Term};
use markup_infer::learn::forest::majority_vote;
use markup_infer::learn::{
    Criterion, DecisionTree, ForestParams, GaussianNb, Hyperparameters, LinearSvm, Model, RandomForest, SvmParams,
};
use markup_infer::pipeline::{run_pipeline, BaselineKind, PipelineConfig, REPORT_FILE};
use markup_infer::synthetic::{generate, SyntheticCorpusSpec};
use markup_infer::vocab::Vocabulary;
use markup_infer::{RDF_TYPE, SCHEMA_NS};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Run one criterion, print its line, and fail the test if it failed or
/// overran its budget.
fn criterion(id: u32, name: &str, budget: Duration, body: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let result = match catch_unwind(AssertUnwindSafe(body)) {
        Ok(r) => r,
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into())),
    };
    let elapsed = start.elapsed();
    let result = result.and_then(|detail| {
        if elapsed <= budget {
            Ok(detail)
        } else {
            Err(format!("{detail}; runtime {:.2?} over budget {:.0?}", elapsed, budget))
        }
    });
    let (tag, detail) = match &result {
        Ok(d) => ("PASS", d.clone()),
        Err(d) => ("FAIL", d.clone()),
    };
    let line = format!("[{tag}] criterion {id:>2} {name} ({:.2?} / {:.0?}): {detail}\n", elapsed, budget);
    let _ = std::io::stderr().write_all(line.as_bytes());
    if let Err(e) = result {
        panic!("criterion {id} ({name}) failed: {e}");
    }
}

fn schema(local: &str) -> String {
    format!("{SCHEMA_NS}{local}")
}

// ---------------------------------------------------------------- 1

/// 180 valid lines in canonical form.
fn valid_lines() -> Vec<String> {
    let preds = ["name", "startDate", "location", "url", "description", "performer"];
    let mut lines = Vec::new();
    for i in 0..180 {
        let page = format!("<http://www.site{}.com/events/{}.html>", i % 17, i / 6);
        let subject = if i % 3 == 0 {
            format!("_:node{i:04x}")
        } else {
            format!("<http://www.site{}.com/e/{i}>", i % 17)
        };
        let pred = format!("<{}>", schema(preds[i % preds.len()]));
        let object = match i % 6 {
            0 => format!("<{}>", schema("MusicEvent")),
            1 => format!("\"Concert n\u{00b0}{i} \\\"live\\\"\"@en"),
            2 => format!("\"2016-0{}-1{}\"^^<http://www.w3.org/2001/XMLSchema#date>", 1 + i % 9, i % 10),
            3 => format!("_:place{i}"),
            4 => format!("\"line one\\nline two \\\\ {i}\""),
            _ => format!("\"Caf\u{00e9} {i}\"@fr-CA"),
        };
        let pred = if i % 6 == 0 { format!("<{RDF_TYPE}>") } else { pred };
        lines.push(format!("{subject} {pred} {object} {page} ."));
    }
    lines
}

fn mutated_lines() -> Vec<Vec<u8>> {
    let s = "<http://a.org/s>";
    let p = "<http://schema.org/name>";
    let g = "<http://a.org/page>";
    let mut v: Vec<Vec<u8>> = [
        format!("{s} {p} \"x\" {g}"),
        format!("<http://a.org/s {p} \"x\" {g} ."),
        format!("{s} {p} \"x\" ."),
        format!("{s} {p} \"unterminated {g} ."),
        format!("{s} {p} \"bad \\q escape\" {g} ."),
        format!("{s} \"lit\" \"x\" {g} ."),
        format!("{s} _:pred \"x\" {g} ."),
        format!("\"subject\" {p} \"x\" {g} ."),
        format!("{s} {p} \"x\" {g} {g} ."),
        "hello world".to_string(),
        format!("<http://a b.org/s> {p} \"x\" {g} ."),
        format!("{s} {p} \"x\"@ {g} ."),
        format!("{s} {p} \"x\"^^ {g} ."),
        format!("{s} {p} \"x\" \"graph\" ."),
        format!("{s} ."),
        format!("_: {p} \"x\" {g} ."),
        format!("{s} {p} \"x\" {g} . trailing"),
        format!("{s} {p} \"\\u12G4\" {g} ."),
        format!("{s} {p} ."),
    ]
    .into_iter()
    .map(String::into_bytes)
    .collect();
    let mut bad_utf8 = format!("{s} {p} \"").into_bytes();
    bad_utf8.extend_from_slice(&[0xff, 0xfe]);
    bad_utf8.extend_from_slice(format!("\" {g} .").as_bytes());
    v.push(bad_utf8);
    v
}

#[test]
fn criterion_01_parser_conformance() {
    criterion(1, "parser conformance", Duration::from_secs(1), || {
        let valid = valid_lines();
        let bad = mutated_lines();
        ensure(valid.len() == 180 && bad.len() == 20, || "fixture size".into())?;
        let mut fixture = Vec::new();
        let mut bi = 0;
        for (i, line) in valid.iter().enumerate() {
            fixture.extend_from_slice(line.as_bytes());
            fixture.push(b'\n');
            if i % 9 == 4 && bi < bad.len() {
                fixture.extend_from_slice(&bad[bi]);
                fixture.push(b'\n');
                bi += 1;
            }
        }
        ensure(bi == 20, || format!("only {bi} mutated lines interleaved"))?;
        let (quads, report) = parse_nquads(&fixture[..], ErrorPolicy::SkipAndCount).map_err(|e| e.to_string())?;
        ensure(report.lines == 200, || format!("{} lines read", report.lines))?;
        ensure(report.skipped == 20, || format!("{} skips, errors {:?}", report.skipped, report.errors))?;
        ensure(quads.len() == 180, || format!("{} quads", quads.len()))?;

        let serialise = |qs: &[Quad]| qs.iter().map(|q| q.to_nquads() + "\n").collect::<String>();
        let first = serialise(&quads);
        let expected: String = valid.iter().map(|l| format!("{l}\n")).collect();
        ensure(first == expected, || "serialisation differs from the canonical input".into())?;
        let (again, r2) = parse_nquads(first.as_bytes(), ErrorPolicy::Abort).map_err(|e| e.to_string())?;
        ensure(r2.skipped == 0 && again == quads, || "re-parse changed the quads".into())?;
        ensure(serialise(&again) == first, || "second serialisation not byte-stable".into())?;
        Ok(format!("200 lines, {} skipped, round trip byte-stable", report.skipped))
    });
}

// ---------------------------------------------------------------- 2

#[test]
fn criterion_02_cleansing_fixtures() {
    criterion(2, "cleansing fixtures", Duration::from_secs(1), || {
        let vocab = Vocabulary::bundled();
        // (mutated predicate, canonical predicate)
        let predicate_cases = [
            ("https://schema.org/name", "http://schema.org/name"),
            ("http://www.schema.org/name", "http://schema.org/name"),
            ("http://schema.orgname", "http://schema.org/name"),
            ("https://www.schema.org/startDate", "http://schema.org/startDate"),
            ("http://schema.org/startdate", "http://schema.org/startDate"),
            ("http://schema.org/STARTDATE", "http://schema.org/startDate"),
            ("https://schema.org/NAME", "http://schema.org/name"),
            ("http://SCHEMA.ORG/location", "http://schema.org/location"),
            ("http://schema.org/Event/Name", "http://schema.org/Event/name"),
            ("https://schema.org/event/location", "http://schema.org/Event/location"),
        ];
        // (mutated rdf:type object, canonical type)
        let type_cases = [
            ("https://schema.org/Event", "http://schema.org/Event"),
            ("http://www.schema.org/Event", "http://schema.org/Event"),
            ("http://schema.orgEvent", "http://schema.org/Event"),
            ("http://schema.org/musicevent", "http://schema.org/MusicEvent"),
            ("https://www.schema.org/BUSINESSEVENT", "http://schema.org/BusinessEvent"),
        ];
        let url = "http://example.com/p";
        let subject = Term::Blank("b0".into());
        let mut quads = Vec::new();
        let mut expected = Vec::new();
        for (bad, good) in predicate_cases {
            quads.push(Quad::new(subject.clone(), bad, Term::literal("v"), url));
            expected.push(Quad::new(subject.clone(), good, Term::literal("v"), url));
        }
        for (bad, good) in type_cases {
            quads.push(Quad::new(subject.clone(), RDF_TYPE, Term::iri(bad), url));
            expected.push(Quad::new(subject.clone(), RDF_TYPE, Term::iri(good), url));
        }
        // literals and non-schema.org terms stay untouched
        let keep = [
            Quad::new(subject.clone(), "http://schema.org/name", Term::literal("https://schema.org/NAME"), url),
            Quad::new(subject.clone(), "http://xmlns.com/foaf/0.1/name", Term::literal("x"), url),
        ];
        quads.extend(keep.iter().cloned());
        expected.extend(keep.iter().cloned());
        quads.push(Quad::new(subject.clone(), "http://schema.org/notATerm", Term::literal("x"), url));

        let first = cleanse_quads(quads.clone(), vocab, UndefinedPolicy::Drop);
        for (got, want) in first.quads.iter().zip(&expected) {
            ensure(got == want, || format!("{} restored as {}", want.to_nquads(), got.to_nquads()))?;
        }
        ensure(first.quads.len() == expected.len(), || format!("{} quads out", first.quads.len()))?;
        let r = &first.report;
        ensure(r.dropped_undefined == 1 && r.quads_in == quads.len() && r.quads_out + r.dropped_undefined == r.quads_in, || {
            format!("{r:?}")
        })?;
        ensure(r.namespace_fixes > 0 && r.casing_fixes > 0, || format!("{r:?}"))?;

        let second = cleanse_quads(first.quads.clone(), vocab, UndefinedPolicy::Drop);
        ensure(second.quads == first.quads, || "second pass changed the quads".into())?;
        let r2 = &second.report;
        ensure(r2.namespace_fixes == 0 && r2.casing_fixes == 0 && r2.dropped_undefined == 0, || {
            format!("second pass {r2:?}")
        })?;
        Ok(format!(
            "{} mutations restored ({} namespace, {} casing fixes); second pass 0 fixes",
            predicate_cases.len() + type_cases.len(),
            r.namespace_fixes,
            r.casing_fixes
        ))
    });
}

// ---------------------------------------------------------------- 3

fn statement(p: &str, o: Term) -> Statement {
    Statement {
        predicate: p.to_string(),
        object: o,
    }
}

fn record(subject: &str, url: &str, statements: Vec<Statement>) -> NodeRecord {
    NodeRecord {
        subject: Term::Blank(subject.into()),
        url: url.into(),
        pld: "gdssummits.com".into(),
        tld: ".com".into(),
        statements,
    }
}

/// Independent key rule for the event task: rdf:type stays, composite
/// predicates generalise event subtypes, plain predicates take `Event` when
/// the node is typed below it.
fn oracle_key(pred: &str, node: &NodeRecord, vocab: &Vocabulary) -> Option<String> {
    if pred == RDF_TYPE {
        return Some("rdf:type".into());
    }
    let local = pred.strip_prefix(SCHEMA_NS)?;
    let is_event = |t: &str| vocab.is_subtype(&schema(t), &schema("Event")).unwrap_or(false);
    if let Some((t, p)) = local.split_once('/') {
        return Some(if is_event(t) { format!("s:Event/{p}") } else { format!("s:{t}/{p}") });
    }
    let types: Vec<&str> = node
        .statements
        .iter()
        .filter(|s| s.predicate == RDF_TYPE)
        .filter_map(|s| s.object.as_iri())
        .filter_map(|t| t.strip_prefix(SCHEMA_NS))
        .filter(|t| vocab.is_type(&schema(t)))
        .collect();
    if types.iter().any(|t| is_event(t)) {
        return Some(format!("s:Event/{local}"));
    }
    // most specific known type, lexicographically first
    let specific: BTreeSet<&str> = types
        .iter()
        .copied()
        .filter(|t| !types.iter().any(|o| o != t && vocab.is_subtype(&schema(o), &schema(t)).unwrap_or(false)))
        .collect();
    Some(match specific.iter().next() {
        Some(t) => format!("s:{t}/{local}"),
        None => format!("s:{local}"),
    })
}

fn normalised(counts: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    let norm = counts.values().map(|c| c * c).sum::<f64>().sqrt();
    counts.iter().map(|(k, c)| (k.clone(), c / norm)).collect()
}

fn block_by_key(space: &FeatureSpace, block: &[(usize, f64)], offset: usize) -> BTreeMap<String, f64> {
    let names: HashMap<usize, &String> = space.term_index.iter().map(|(k, &i)| (i + offset, k)).collect();
    block.iter().map(|(d, v)| (names[d].clone(), *v)).collect()
}

fn l2(block: &[(usize, f64)]) -> f64 {
    block.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
}

#[test]
fn criterion_03_feature_oracle() {
    criterion(3, "feature oracle", Duration::from_secs(5), || {
        let vocab = Vocabulary::bundled();
        let url = "https://gdssummits.com/nghealthcare/us/";
        let node = record(
            "node3957c770b4f7c0bd1a17805dd8ca406",
            url,
            vec![
                statement(RDF_TYPE, Term::iri(schema("BusinessEvent"))),
                statement(&schema("Event/name"), Term::lang_literal("NG Healthcare Summit US", "en")),
                statement(
                    &schema("Event/location"),
                    Term::lang_literal("Omni Barton Creek Resort & Spa, Austin, Texas", "en"),
                ),
            ],
        );
        let org = record(
            "nodea9ff152514bcfb63c2714bc1336b2b3",
            url,
            vec![statement(&schema("Organization/url"), Term::iri("http://www.gdsinternational.com"))],
        );
        let other = record(
            "node4ccbf7f34c95f14168f5fdb47b73ab",
            url,
            vec![statement(RDF_TYPE, Term::iri(schema("BusinessEvent")))],
        );
        let page = Arc::new(Page {
            url: url.into(),
            nodes: vec![node.clone(), org, other],
        });
        let inst = LabeledInstance::new(page.clone(), 0, "BusinessEvent").map_err(|e| e.to_string())?;
        let space = FeatureSpace::build(&[inst], vocab, &Task::Events, FeatureBlocks::default()).map_err(|e| e.to_string())?;

        let expect_node: BTreeMap<String, f64> =
            [("rdf:type", 1.0), ("s:Event/name", 1.0), ("s:Event/location", 1.0)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect();
        let expect_page: BTreeMap<String, f64> = [
            ("rdf:type", 2.0),
            ("s:Event/name", 1.0),
            ("s:Event/location", 1.0),
            ("s:Organization/url", 1.0),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();

        let nv = space.node_vocab(&node, vocab);
        let pv = space.page_vocab(&page.nodes, vocab);
        let close = |a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>| {
            a.len() == b.len() && a.iter().all(|(k, v)| b.get(k).is_some_and(|w| (v - w).abs() <= 1e-12))
        };
        let got_node = block_by_key(&space, &nv, space.node_range().start);
        let got_page = block_by_key(&space, &pv, space.page_range().start);
        ensure(close(&got_node, &normalised(&expect_node)), || format!("node-vocab {got_node:?}"))?;
        ensure(close(&got_page, &normalised(&expect_page)), || format!("page-vocab {got_page:?}"))?;
        ensure((l2(&nv) - 1.0).abs() <= 1e-12 && (l2(&pv) - 1.0).abs() <= 1e-12, || "norms".into())?;

        // brute-force recount over random synthetic nodes
        let corpus = generate(&SyntheticCorpusSpec::events(11, 120, 0.7)).map_err(|e| e.to_string())?;
        let cleansed = cleanse_quads(corpus.quads, vocab, UndefinedPolicy::Drop);
        let pages = PageIndex::build(assemble_nodes(cleansed.quads, SuffixList::bundled()));
        let mut all: Vec<(Arc<Page>, usize)> = pages.nodes().map(|(p, i)| (p.clone(), i)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut picked = Vec::new();
        while picked.len() < 1000 && !all.is_empty() {
            let j = rng.random_range(0..all.len());
            picked.push(all.swap_remove(j));
        }
        ensure(picked.len() == 1000, || format!("only {} synthetic nodes", picked.len()))?;
        let instances: Vec<LabeledInstance> = picked
            .iter()
            .map(|(p, i)| LabeledInstance::new(p.clone(), *i, "x"))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let space = FeatureSpace::build(&instances, vocab, &Task::Events, FeatureBlocks::default()).map_err(|e| e.to_string())?;
        for inst in &instances {
            let count = |nodes: &[&NodeRecord]| {
                let mut c: BTreeMap<String, f64> = BTreeMap::new();
                for n in nodes {
                    for s in &n.statements {
                        if let Some(k) = oracle_key(&s.predicate, n, vocab) {
                            *c.entry(k).or_default() += 1.0;
                        }
                    }
                }
                c
            };
            let want_node = count(&[inst.node()]);
            let want_page = count(&inst.page_context().iter().collect::<Vec<_>>());
            let nv = space.node_vocab(inst.node(), vocab);
            let pv = space.page_vocab(inst.page_context(), vocab);
            let got_node = block_by_key(&space, &nv, space.node_range().start);
            let got_page = block_by_key(&space, &pv, space.page_range().start);
            let want_node = if want_node.is_empty() { want_node } else { normalised(&want_node) };
            ensure(close(&got_node, &want_node), || format!("node {:?}: {got_node:?} vs {want_node:?}", inst.id()))?;
            ensure(close(&got_page, &normalised(&want_page)), || format!("page of {:?}", inst.id()))?;
            for b in [&nv, &pv] {
                ensure(b.is_empty() || (l2(b) - 1.0).abs() <= 1e-12, || "recount norm".into())?;
            }
        }
        Ok("worked examples exact, norms 1 within 1e-12, 1000 recounts agree".into())
    });
}

// ---------------------------------------------------------------- 4

/// 8 classes over Zipf-distributed plds; every class holds more than `cap`.
fn skewed_dataset(seed: u64, cap: usize) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zipf = Zipf::new(400.0, 1.2).unwrap();
    let mut classes = BTreeMap::new();
    for c in 0..8 {
        let label = format!("C{c}");
        let size = cap * (6 + c) / 4;
        let members = (0..size)
            .map(|i| {
                let rank = zipf.sample(&mut rng) as usize;
                let pld = format!("site{rank}.com");
                let node = NodeRecord {
                    subject: Term::Blank(format!("c{c}n{i}")),
                    url: format!("http://www.{pld}/{c}/{i}"),
                    pld,
                    tld: ".com".into(),
                    statements: vec![statement(RDF_TYPE, Term::iri(schema("Event")))],
                };
                LabeledInstance::standalone(node, label.clone())
            })
            .collect();
        classes.insert(label, members);
    }
    LabeledDataset {
        task: Task::Events,
        classes,
        cap,
    }
}

#[test]
fn criterion_04_sampling_properties() {
    criterion(4, "sampling properties", Duration::from_secs(30), || {
        let cap = 2000;
        let mut wins = 0;
        for seed in 0..20u64 {
            let ds = skewed_dataset(1000 + seed, cap);
            let s = sample(&ds, SamplingStrategy::Stratified, seed).map_err(|e| e.to_string())?;
            let p = sample(&ds, SamplingStrategy::PldAware, seed).map_err(|e| e.to_string())?;
            for out in [&s, &p] {
                ensure(out.classes.len() == 8 && out.classes.values().all(|m| m.len() == cap), || {
                    format!("seed {seed}: unbalanced {:?}", out.classes.values().map(Vec::len).collect::<Vec<_>>())
                })?;
                for (class, members) in &out.classes {
                    let ids: BTreeSet<_> = members.iter().map(|i| i.id()).collect();
                    let pool: BTreeSet<_> = ds.classes[class].iter().map(|i| i.id()).collect();
                    ensure(ids.len() == cap && ids.is_subset(&pool), || format!("seed {seed}: {class} not a subset"))?;
                }
            }
            if p.distinct_plds() > s.distinct_plds() {
                wins += 1;
            }
        }
        ensure(wins >= 18, || format!("pld-aware more diverse in only {wins}/20 seeds"))?;
        let alloc = fair_share_allocation(&[("A", 10), ("B", 3), ("C", 1)], 6).map_err(|e| e.to_string())?;
        ensure(alloc == vec![3, 2, 1], || format!("fair share gave {alloc:?}"))?;
        Ok(format!("exact balance; pld-aware more diverse in {wins}/20 seeds; fair share (3, 2, 1)"))
    });
}

// ---------------------------------------------------------------- 5

fn impurity(criterion: Criterion, counts: &[f64]) -> f64 {
    let n: f64 = counts.iter().sum();
    match criterion {
        Criterion::Gini => 1.0 - counts.iter().map(|c| (c / n) * (c / n)).sum::<f64>(),
        Criterion::InformationGain => counts
            .iter()
            .filter(|&&c| c > 0.0)
            .map(|c| -(c / n) * (c / n).log2())
            .sum(),
    }
}

/// Best root decrease by trying every feature and every cut between
/// distinct values.
fn exhaustive_best(rows: &[Vec<f64>], y: &[usize], k: usize, criterion: Criterion) -> Option<f64> {
    let n = rows.len() as f64;
    let hist = |idx: &[usize]| {
        let mut h = vec![0.0; k];
        for &i in idx {
            h[y[i]] += 1.0;
        }
        h
    };
    let all: Vec<usize> = (0..rows.len()).collect();
    let parent = impurity(criterion, &hist(&all));
    let mut best: Option<f64> = None;
    for f in 0..rows[0].len() {
        let values: BTreeSet<u64> = rows.iter().map(|r| r[f].to_bits()).collect();
        let values: Vec<f64> = {
            let mut v: Vec<f64> = values.into_iter().map(f64::from_bits).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        for cut in &values[..values.len().saturating_sub(1)] {
            let (l, r): (Vec<usize>, Vec<usize>) = all.iter().partition(|&&i| rows[i][f] <= *cut);
            let dec = parent
                - l.len() as f64 / n * impurity(criterion, &hist(&l))
                - r.len() as f64 / n * impurity(criterion, &hist(&r));
            if best.is_none_or(|b| dec > b) {
                best = Some(dec);
            }
        }
    }
    best
}

fn gaussian_posterior(rows: &[Vec<f64>], y: &[usize], k: usize, x: &[f64]) -> Vec<f64> {
    let n = rows.len() as f64;
    let d = rows[0].len();
    let col_var = |f: usize| {
        let m = rows.iter().map(|r| r[f]).sum::<f64>() / n;
        rows.iter().map(|r| (r[f] - m).powi(2)).sum::<f64>() / n
    };
    let max_var = (0..d).map(col_var).fold(0.0, f64::max);
    let eps = 1e-9 * if max_var > 0.0 { max_var } else { 1.0 };
    // log domain keeps the product of densities from underflowing
    let mut joint = vec![0.0; k];
    for (c, j) in joint.iter_mut().enumerate() {
        let members: Vec<&Vec<f64>> = rows.iter().zip(y).filter(|(_, &l)| l == c).map(|(r, _)| r).collect();
        let nc = members.len() as f64;
        let mut log_p = (nc / n).ln();
        for f in 0..d {
            let mu = members.iter().map(|r| r[f]).sum::<f64>() / nc;
            let var = members.iter().map(|r| (r[f] - mu).powi(2)).sum::<f64>() / nc + eps;
            log_p += -(x[f] - mu).powi(2) / (2.0 * var) - 0.5 * (2.0 * std::f64::consts::PI * var).ln();
        }
        *j = log_p;
    }
    let top = joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let joint: Vec<f64> = joint.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = joint.iter().sum();
    joint.iter().map(|p| p / z).collect()
}

#[test]
fn criterion_05_classifier_oracles() {
    criterion(5, "classifier oracles", Duration::from_secs(60), || {
        let mut rng = ChaCha8Rng::seed_from_u64(5);

        // decision-tree root split on small fixtures
        let mut fixtures = 0;
        for _ in 0..3000 {
            let n = rng.random_range(2..=8);
            let d = rng.random_range(1..=3);
            let k = rng.random_range(2..=3);
            let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(0..4) as f64).collect()).collect();
            let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
            let x = Matrix::from_rows(&rows).map_err(|e| e.to_string())?;
            for crit in [Criterion::Gini, Criterion::InformationGain] {
                let got = DecisionTree::root_split(&x, &y, k, crit);
                let want = exhaustive_best(&rows, &y, k, crit);
                match (got, want) {
                    (None, None) => {}
                    (Some(g), Some(w)) => {
                        ensure((g.decrease - w).abs() <= 1e-12, || format!("{rows:?} {y:?}: {} vs {w}", g.decrease))?;
                        // the reported split must realise the reported decrease
                        let all: Vec<usize> = (0..n).collect();
                        let (l, r): (Vec<usize>, Vec<usize>) = all.iter().partition(|&&i| rows[i][g.feature] <= g.threshold);
                        let h = |idx: &[usize]| {
                            let mut h = vec![0.0; k];
                            for &i in idx {
                                h[y[i]] += 1.0;
                            }
                            h
                        };
                        let realised = impurity(crit, &h(&all))
                            - l.len() as f64 / n as f64 * impurity(crit, &h(&l))
                            - r.len() as f64 / n as f64 * impurity(crit, &h(&r));
                        ensure(!l.is_empty() && !r.is_empty() && (realised - w).abs() <= 1e-12, || {
                            format!("split {g:?} realises {realised}, best {w}")
                        })?;
                    }
                    (g, w) => return Err(format!("{rows:?} {y:?}: tree {g:?} vs exhaustive {w:?}")),
                }
            }
            fixtures += 1;
        }

        // naive Bayes posteriors against the density formula
        for _ in 0..200 {
            let k = rng.random_range(2..=4);
            let d = rng.random_range(1..=4);
            let n = rng.random_range(2 * k..=20);
            let y: Vec<usize> = (0..n).map(|i| i % k).collect();
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..d).map(|f| y[i] as f64 * 0.7 + f as f64 * 0.1 + rng.random_range(-1.0..1.0)).collect())
                .collect();
            let model = GaussianNb::fit(&Matrix::from_rows(&rows).map_err(|e| e.to_string())?, &y, k).map_err(|e| e.to_string())?;
            let probe: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..3.0)).collect();
            let got = model.posterior(&probe);
            let want = gaussian_posterior(&rows, &y, k, &probe);
            for (g, w) in got.iter().zip(&want) {
                ensure((g - w).abs() <= 1e-9, || format!("posterior {got:?} vs {want:?}"))?;
            }
        }

        // linear SVM separates a separable fixture
        let centres = [(-4.0, -4.0), (4.0, -4.0), (0.0, 5.0)];
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for (c, (cx, cy)) in centres.iter().enumerate() {
            for _ in 0..40 {
                rows.push(vec![cx + rng.random_range(-1.0..1.0), cy + rng.random_range(-1.0..1.0)]);
                y.push(c);
            }
        }
        let x = Matrix::from_rows(&rows).map_err(|e| e.to_string())?;
        let svm = LinearSvm::fit(&x, &y, 3, SvmParams::default(), 7).map_err(|e| e.to_string())?;
        let correct = (0..x.rows).filter(|&i| svm.predict(x.row(i)) == y[i]).count();
        ensure(correct == x.rows, || format!("SVM train accuracy {correct}/{}", x.rows))?;

        // forest majority vote
        for _ in 0..10_000 {
            let k = rng.random_range(1..=6);
            let t = rng.random_range(1..=25);
            let votes: Vec<usize> = (0..t).map(|_| rng.random_range(0..k)).collect();
            let mut counts = vec![0usize; k];
            for &v in &votes {
                counts[v] += 1;
            }
            let winner = majority_vote(&votes, k);
            let top = *counts.iter().max().unwrap();
            ensure(counts.iter().sum::<usize>() == t, || "votes lost".into())?;
            ensure(counts[winner] == top && counts[..winner].iter().all(|&c| c < top), || {
                format!("votes {votes:?} gave {winner}")
            })?;
        }
        let forest = RandomForest::fit(&x, &y, 3, ForestParams::default(), 3).map_err(|e| e.to_string())?;
        for i in 0..x.rows {
            let votes = forest.votes(x.row(i));
            ensure(votes.len() == forest.trees.len(), || "one vote per tree".into())?;
            ensure(forest.predict(x.row(i)) == majority_vote(&votes, 3), || "forest ignores its votes".into())?;
        }
        Ok(format!("{fixtures} tree fixtures x 2 criteria, 200 posteriors, SVM 1.0, 10^4 vote cases"))
    });
}

// ---------------------------------------------------------------- 6

#[test]
fn criterion_06_random_baseline() {
    criterion(6, "random baseline sanity", Duration::from_secs(30), || {
        let n = 100_000;
        let mut out = Vec::new();
        for (k, expect) in [(8usize, 0.125), (2, 0.5)] {
            let classes: Vec<String> = (0..k).map(|c| format!("C{c}")).collect();
            let gold: Vec<String> = (0..n).map(|i| classes[i % k].clone()).collect();
            for seed in 0..3u64 {
                let predicted = RandomBaseline::new(&classes, seed).map_err(|e| e.to_string())?.predict_n(n);
                let f1 = evaluate(&predicted, &gold, &classes).map_err(|e| e.to_string())?.macro_f1;
                ensure((f1 - expect).abs() <= 0.01, || format!("{k} classes, seed {seed}: macro F1 {f1}"))?;
                if seed == 0 {
                    out.push(format!("{k}-class {f1:.4}"));
                }
            }
        }
        Ok(out.join(", "))
    });
}

// ---------------------------------------------------------------- 7

fn write_corpus(spec: &SyntheticCorpusSpec, path: &Path) -> Result<(), String> {
    let corpus = generate(spec).map_err(|e| e.to_string())?;
    let f = std::fs::File::create(path).map_err(|e| e.to_string())?;
    corpus.write_nquads(std::io::BufWriter::new(f)).map_err(|e| e.to_string())
}

#[test]
fn criterion_07_end_to_end_ordering() {
    criterion(7, "end-to-end ordering", Duration::from_secs(300), || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut lines = Vec::new();
        for seed in 0..5u64 {
            let input = dir.path().join(format!("corpus{seed}.nq"));
            write_corpus(&SyntheticCorpusSpec::events(seed, 300, 0.7), &input)?;
            let cfg = PipelineConfig {
                input,
                output_dir: dir.path().join(format!("run{seed}")),
                task: Task::Events,
                top_k: 7,
                strategy: SamplingStrategy::Stratified,
                cap: None,
                split_ratio: 0.8,
                seed,
                algorithm: markup_infer::learn::Algorithm::Rforest,
                hyperparameters: Some(Hyperparameters::Rforest(ForestParams::default())),
                search_trials: 0,
                baselines: vec![BaselineKind::Random, BaselineKind::Sdtype],
                policy: UndefinedPolicy::Drop,
                kgb_fixtures: None,
            };
            let run = run_pipeline(&cfg).map_err(|e| e.to_string())?;
            let f1 = |name: &str| run.results.iter().find(|r| r.system == name).map(|r| r.report.macro_f1).unwrap();
            let (rf, sd, rnd) = (f1("rforest"), f1("sdtype"), f1("random"));
            lines.push(format!("seed {seed}: RF {rf:.3} > SD {sd:.3} > Rnd {rnd:.3}"));
            ensure(rf > sd && sd > rnd, || format!("ordering broken: {}", lines.join("; ")))?;
            ensure(rf >= 0.85, || format!("RF below 0.85: {}", lines.join("; ")))?;
        }
        Ok(lines.join("; "))
    });
}

// ---------------------------------------------------------------- 8

#[test]
fn criterion_08_sampling_benefit() {
    criterion(8, "sampling benefit direction", Duration::from_secs(300), || {
        let vocab = Vocabulary::bundled();
        let mut wins = 0;
        let mut lines = Vec::new();
        for seed in 0..5u64 {
            let corpus = generate(&SyntheticCorpusSpec::skewed_events(seed, 600)).map_err(|e| e.to_string())?;
            let cleansed = cleanse_quads(corpus.quads, vocab, UndefinedPolicy::Drop);
            let pages = PageIndex::build(assemble_nodes(cleansed.quads, SuffixList::bundled()));
            let (ds, _) = build_event_dataset(&pages, vocab, 7, None).map_err(|e| e.to_string())?;
            let (mut pool, test) = split_by_pld(&ds, 0.25, 0.05, seed).map_err(|e| e.to_string())?;
            pool.cap /= 2;
            let classes = pool.class_names();
            let gold: Vec<String> = test.instances().map(|i| i.label.clone()).collect();
            let test_instances: Vec<LabeledInstance> = test.instances().cloned().collect();
            let mut scores = Vec::new();
            for strategy in [SamplingStrategy::Stratified, SamplingStrategy::PldAware] {
                let train: Vec<LabeledInstance> =
                    sample(&pool, strategy, seed).map_err(|e| e.to_string())?.instances().cloned().collect();
                let hp = Hyperparameters::Rforest(ForestParams::default());
                let model = Model::train(&train, &classes, vocab, &Task::Events, hp, seed, "skewed").map_err(|e| e.to_string())?;
                let predicted = model.predict_instances(&test_instances, vocab).map_err(|e| e.to_string())?;
                scores.push(evaluate(&predicted, &gold, &classes).map_err(|e| e.to_string())?.macro_f1);
            }
            if scores[1] >= scores[0] {
                wins += 1;
            }
            lines.push(format!("seed {seed}: p {:.3} vs s {:.3}", scores[1], scores[0]));
        }
        ensure(wins >= 4, || format!("pld-aware >= stratified in {wins}/5: {}", lines.join("; ")))?;
        Ok(format!("{wins}/5 seeds; {}", lines.join("; ")))
    });
}

// ---------------------------------------------------------------- 9

#[test]
fn criterion_09_ttest_oracle() {
    criterion(9, "t-test oracle", Duration::from_secs(1), || {
        let a = [2.0, 1.0, 3.0, 0.0, 2.0];
        let b = [0.0; 5];
        let r = paired_ttest(&a, &b).map_err(|e| e.to_string())?;
        // independent oracle: textbook statistic and the statrs CDF
        let n = a.len() as f64;
        let mean = a.iter().sum::<f64>() / n;
        let sd = (a.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let t = mean / (sd / n.sqrt());
        let p = 2.0 * (1.0 - StudentsT::new(0.0, 1.0, n - 1.0).unwrap().cdf(t));
        ensure((r.t - t).abs() <= 1e-9 && (r.p - p).abs() <= 1e-9, || format!("{r:?} vs t {t} p {p}"))?;
        ensure((r.t - 3.138).abs() <= 1e-3, || format!("t = {}", r.t))?;
        ensure((r.p - 0.035).abs() <= 1e-3, || format!("p = {}", r.p))?;
        ensure(r.df == 4, || format!("df = {}", r.df))?;
        Ok(format!("t = {:.4}, p = {:.4}, df = {}", r.t, r.p, r.df))
    });
}

// ---------------------------------------------------------------- 10

fn without_timestamp(bytes: &[u8]) -> Vec<u8> {
    String::from_utf8_lossy(bytes)
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"generated_at\""))
        .flat_map(|l| l.bytes().chain(std::iter::once(b'\n')))
        .collect()
}

#[test]
fn criterion_10_determinism_audit() {
    criterion(10, "determinism audit", Duration::from_secs(300), || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let input = dir.path().join("corpus.nq");
        write_corpus(&SyntheticCorpusSpec::skewed_events(21, 250), &input)?;
        let fixtures = dir.path().join("linking.json");
        std::fs::write(&fixtures, "{}").map_err(|e| e.to_string())?;
        let config = |out: &str| PipelineConfig {
            input: input.clone(),
            output_dir: dir.path().join(out),
            task: Task::Events,
            top_k: 7,
            strategy: SamplingStrategy::PldAware,
            cap: None,
            split_ratio: 0.8,
            seed: 42,
            algorithm: markup_infer::learn::Algorithm::Rforest,
            hyperparameters: None,
            search_trials: 4,
            baselines: vec![BaselineKind::Random, BaselineKind::Sdtype, BaselineKind::Kgb],
            policy: UndefinedPolicy::Drop,
            kgb_fixtures: Some(fixtures.clone()),
        };
        run_pipeline(&config("a")).map_err(|e| e.to_string())?;
        run_pipeline(&config("b")).map_err(|e| e.to_string())?;
        let read = |run: &str, file: &str| std::fs::read(dir.path().join(run).join(file)).map_err(|e| e.to_string());
        let (ra, rb) = (read("a", REPORT_FILE)?, read("b", REPORT_FILE)?);
        let stamped = |r: &[u8]| r.windows(14).any(|w| w == b"\"generated_at\"");
        ensure(stamped(&ra) && stamped(&rb), || "report lacks its timestamp field".into())?;
        ensure(without_timestamp(&ra) == without_timestamp(&rb), || "reports differ".into())?;
        for file in ["model.json", "dataset.jsonl", "dataset.pages.jsonl", "report.txt"] {
            ensure(read("a", file)? == read("b", file)?, || format!("{file} differs"))?;
        }
        Ok(format!("{} report bytes identical modulo timestamp; artifacts identical", ra.len()))
    });
}
