//! `markup-infer`: batch commands over Web markup corpora, from parsing and
//! cleansing through dataset construction, training and evaluation.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 external-service
//! error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use markup_infer::cleansing::UndefinedPolicy;
use markup_infer::dataset::{SamplingStrategy, Task};
use markup_infer::learn::Algorithm;

#[derive(Parser, Debug)]
#[command(name = "markup-infer", version, about = "Infer schema.org types of Web markup nodes")]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Drop,
    Keep,
}

impl From<PolicyArg> for UndefinedPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Drop => UndefinedPolicy::Drop,
            PolicyArg::Keep => UndefinedPolicy::Keep,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BaselineArg {
    Random,
    Sdtype,
    Kgb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScoringArg {
    Generous,
    Strict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SyntheticKind {
    /// Moderate-signal event subtypes.
    Events,
    /// Event subtypes over a heavily skewed pld distribution.
    Skewed,
    /// Movies labeled through s:genre.
    Movies,
}

/// Per-class cap: `auto` (the smallest class) or a positive integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cap(pub Option<usize>);

impl std::str::FromStr for Cap {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Cap(None));
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("expected auto or a positive integer, got {s:?}")),
            Ok(n) => Ok(Cap(Some(n))),
        }
    }
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long, default_value = "stratified")]
    pub strategy: SamplingStrategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-class size: `auto` (smallest class) or N.
    #[arg(long, default_value = "auto")]
    pub cap: Cap,
    /// Per-class train fraction.
    #[arg(long, default_value_t = 0.8)]
    pub split_ratio: f64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Summarise the nodes of a corpus.
    Profile {
        #[arg(long = "in")]
        input: PathBuf,
        /// Only nodes of this schema.org type or its subtypes (local name or IRI).
        #[arg(long = "type")]
        type_filter: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repair namespace and casing errors in schema.org terms.
    Cleanse {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "drop")]
        policy: PolicyArg,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Label, balance and split a training dataset from a corpus.
    BuildDataset {
        #[arg(long = "in")]
        input: PathBuf,
        /// `events` or `genre:<name>`.
        #[arg(long)]
        task: Task,
        /// Number of head classes (event subtypes or genres).
        #[arg(long, default_value_t = 7)]
        top_k: usize,
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long, value_enum, default_value = "drop")]
        policy: PolicyArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-balance and re-split an existing dataset file.
    Sample {
        #[arg(long)]
        dataset: PathBuf,
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random hyperparameter search on the training part of a dataset.
    Search {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        algorithm: Algorithm,
        #[arg(long, default_value_t = markup_infer::learn::DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a model on the training part of a dataset.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        algorithm: Algorithm,
        /// JSON hyperparameters (as written by `search`).
        #[arg(long, conflicts_with = "trials")]
        hyperparameters: Option<PathBuf>,
        /// Pick hyperparameters by random search first.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a model on the test part of a dataset.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit inferred statements for the nodes of a corpus as N-Quads.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "keep")]
        policy: PolicyArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a baseline on the test part of a dataset.
    Baseline {
        #[arg(long, value_enum)]
        kind: BaselineArg,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Offline answers for the entity-linking baseline.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "generous")]
        scoring: ScoringArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic corpus and its gold labels.
    GenSynthetic {
        #[arg(long, value_enum, default_value = "events")]
        kind: SyntheticKind,
        /// Full generator spec as JSON; overrides the other shape flags.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        nodes_per_class: usize,
        #[arg(long, default_value_t = 0.7)]
        signal: f64,
        /// Genres of the movie corpus.
        #[arg(long, value_delimiter = ',', default_value = "Drama,Comedy,Action,Thriller,Romance,Horror,Crime")]
        genres: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        gold: Option<PathBuf>,
    },
    /// Run the whole pipeline from a JSON config; flags override the file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        task: Option<Task>,
        #[arg(long)]
        algorithm: Option<Algorithm>,
        #[arg(long)]
        strategy: Option<SamplingStrategy>,
        #[arg(long)]
        cap: Option<Cap>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Offline answers for the entity-linking baseline.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Print the stages without running them.
        #[arg(long)]
        dry_run: bool,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<markup_infer::Error>() {
        Some(e) if e.is_service() => 3,
        _ => 2,
    }
}

/// The error and its causes, skipping causes already quoted by their parent.
fn describe(err: &anyhow::Error) -> String {
    let mut out = err.to_string();
    let mut last = out.clone();
    for cause in err.chain().skip(1) {
        let text = cause.to_string();
        if !last.contains(&text) {
            out.push_str(": ");
            out.push_str(&text);
        }
        last = text;
    }
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match commands::execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}
