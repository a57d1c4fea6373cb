//! `triage`: file-to-file pipeline for smart-contract code review triage.
//!
//! Every subcommand reads its inputs, writes its output to `--out` and a run
//! manifest to `<out>.manifest.json`. Logging goes to stderr and is
//! controlled by `TRIAGE_LOG` (e.g. `TRIAGE_LOG=info`).

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "triage", version, about = "Smart-contract code review triage pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Merge CVE exports and GitHub issue exports into a review corpus (JSONL).
    Ingest(IngestArgs),
    /// Clean, tokenize, remove stopwords and stem every review (JSONL).
    Preprocess(PreprocessArgs),
    /// Rank weakness keywords by summed TF-IDF and attach priorities (CSV).
    Lexicon(LexiconArgs),
    /// Auto-label a corpus with the highest-priority matching lexicon term.
    Label(LabelArgs),
    /// Split the labeled reviews of a corpus into train and test corpora.
    Split(SplitArgs),
    /// Train the classifier and save the best checkpoint.
    Train(TrainArgs),
    /// Predict priorities for every review of a corpus (JSONL).
    Predict(PredictArgs),
    /// Compare predictions with corpus labels: confusion matrix and metrics.
    Evaluate(EvaluateArgs),
    /// Cohen's kappa between the labels of two corpora.
    Kappa(KappaArgs),
    /// Classify CVE exploitation timelines and aggregate the verdicts.
    Zeroday(ZerodayArgs),
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CveFormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RankingArg {
    /// TF-IDF summed over the corpus.
    Tfidf,
    /// Raw occurrence counts.
    Raw,
}

#[derive(Args, Debug, Serialize)]
pub struct IngestArgs {
    /// NVD CVE export (JSON array or CSV); repeatable.
    #[arg(long = "cve")]
    pub cve: Vec<PathBuf>,
    /// Format of the CVE exports; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<CveFormatArg>,
    /// GitHub issue export (JSON array); repeatable.
    #[arg(long = "github")]
    pub github: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct PreprocessArgs {
    /// Corpus JSONL.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Stopword list (one per line, `#` comments); bundled English list by default.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct LexiconArgs {
    /// Tokenized reviews JSONL (output of `preprocess`).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Vulnerability catalog JSON; bundled catalog by default.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// `term,priority` CSV; bundled mapping by default.
    #[arg(long)]
    pub mapping: Option<PathBuf>,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    #[arg(long, default_value_t = triage_core::lexicon::DEFAULT_TOP_K)]
    pub top_k: usize,
    #[arg(long, value_enum, default_value_t = RankingArg::Tfidf)]
    pub ranking: RankingArg,
    /// Only write the ranked terms (`term,score,doc_frequency,rank`); no mapping needed.
    #[arg(long)]
    pub rank_only: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct LabelArgs {
    /// Corpus JSONL.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Lexicon CSV (output of `lexicon`).
    #[arg(long)]
    pub lexicon: PathBuf,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct SplitArgs {
    /// Labeled corpus JSONL; unlabeled reviews are left out.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Keep label proportions equal in both parts.
    #[arg(long)]
    pub stratified: bool,
    /// Output directory; receives `train.jsonl` and `test.jsonl`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct TrainArgs {
    /// Labeled training corpus JSONL.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Labeled validation corpus; carved out of `--in` when omitted.
    #[arg(long)]
    pub validation: Option<PathBuf>,
    /// Share of `--in` held out for validation when `--validation` is absent.
    #[arg(long, default_value_t = 0.1)]
    pub validation_fraction: f64,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    #[arg(long, default_value_t = triage_core::features::DEFAULT_DIM)]
    pub dim: usize,
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    #[arg(long, default_value_t = 64)]
    pub batch: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Checkpoint path; the history goes to `<out>.history.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Corpus JSONL.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Expected input dimension of the checkpoint.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct EvaluateArgs {
    /// Predictions JSONL (output of `predict`).
    #[arg(long)]
    pub predictions: PathBuf,
    /// Corpus JSONL holding the reference labels.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Also write the confusion matrix as CSV.
    #[arg(long)]
    pub confusion: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct KappaArgs {
    /// First labeled corpus JSONL.
    #[arg(long)]
    pub a: PathBuf,
    /// Second labeled corpus JSONL; compared on ids labeled in both.
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ZerodayArgs {
    /// NVD CVE export.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<CveFormatArg>,
    /// CVE ids to leave out, one per line; the bundled sample list by default.
    #[arg(long, conflicts_with = "no_exclusions")]
    pub exclusions: Option<PathBuf>,
    #[arg(long)]
    pub no_exclusions: bool,
    /// Decide zero-days before checking for an earlier patch.
    #[arg(long)]
    pub zero_day_first: bool,
    /// Also write `cve_id,verdict` per record.
    #[arg(long)]
    pub verdicts: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TRIAGE_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Ingest(a) => manifest::run("ingest", a, &a.out, || commands::ingest(a)),
        Command::Preprocess(a) => manifest::run("preprocess", a, &a.out, || commands::preprocess(a)),
        Command::Lexicon(a) => manifest::run("lexicon", a, &a.out, || commands::lexicon(a)),
        Command::Label(a) => manifest::run("label", a, &a.out, || commands::label(a)),
        Command::Split(a) => manifest::run("split", a, &a.out, || commands::split(a)),
        Command::Train(a) => manifest::run("train", a, &a.out, || commands::train(a)),
        Command::Predict(a) => manifest::run("predict", a, &a.out, || commands::predict(a)),
        Command::Evaluate(a) => manifest::run("evaluate", a, &a.out, || commands::evaluate(a)),
        Command::Kappa(a) => manifest::run("kappa", a, &a.out, || commands::kappa(a)),
        Command::Zeroday(a) => manifest::run("zeroday", a, &a.out, || commands::zeroday(a)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
