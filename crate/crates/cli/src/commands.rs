use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;

use triage_core::classifier::{self, Example, TrainConfig};
use triage_core::corpus::{
    self, cve_to_review, ingest_cve_file, ingest_github_export, split_corpus, CveFormat, SplitMode,
};
use triage_core::eval;
use triage_core::features::vectorize;
use triage_core::lexicon::{self, Lexicon, PriorityMapping, RankingScore, VulnerabilityCatalog};
use triage_core::preprocess::{preprocess_review, Stoplist, TokenizedReview};
use triage_core::zeroday::{self, TimelinePolicy};
use triage_core::{CodeReview, Corpus, PriorityLevel};

use crate::manifest::Outcome;
use crate::{
    CveFormatArg, EvaluateArgs, IngestArgs, KappaArgs, LabelArgs, LexiconArgs, PredictArgs, PreprocessArgs, RankingArg,
    SplitArgs, TrainArgs, ZerodayArgs,
};

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn read_corpus(path: &Path) -> Result<Corpus> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Corpus::read_jsonl(BufReader::new(file)).with_context(|| format!("reading corpus {}", path.display()))
}

fn write_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    corpus.write_jsonl(&mut out)?;
    out.flush()?;
    Ok(())
}

fn write_json(value: &impl Serialize, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn load_stoplist(path: Option<&PathBuf>, inputs: &mut Vec<PathBuf>) -> Result<Stoplist> {
    match path {
        Some(p) => {
            inputs.push(p.clone());
            let text = String::from_utf8(read(p)?).context("stopword list is not UTF-8")?;
            Ok(Stoplist::parse(&text))
        }
        None => Ok(Stoplist::bundled()),
    }
}

fn cve_format(explicit: Option<CveFormatArg>, path: &Path) -> Result<CveFormat> {
    Ok(match explicit {
        Some(CveFormatArg::Json) => CveFormat::Json,
        Some(CveFormatArg::Csv) => CveFormat::Csv,
        None => match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("json") => CveFormat::Json,
            Some("csv") => CveFormat::Csv,
            _ => bail!("cannot infer the format of {}; pass --format", path.display()),
        },
    })
}

/// Preprocesses each review, pairing it with its tokens. Reviews dropped by
/// the length filter are counted and left out.
fn tokenized<'a>(
    reviews: impl IntoIterator<Item = &'a CodeReview>,
    stoplist: &Stoplist,
) -> (Vec<(&'a CodeReview, TokenizedReview)>, usize) {
    let mut kept = Vec::new();
    let mut dropped = 0;
    for review in reviews {
        match preprocess_review(review, stoplist) {
            Some(t) => kept.push((review, t)),
            None => dropped += 1,
        }
    }
    (kept, dropped)
}

pub fn ingest(args: &IngestArgs) -> Result<Outcome> {
    if args.cve.is_empty() && args.github.is_empty() {
        bail!("nothing to ingest: pass --cve and/or --github");
    }
    let mut reviews = Vec::new();
    let mut warnings = 0;
    let mut skipped = 0;
    for path in &args.cve {
        let format = cve_format(args.format, path)?;
        let parsed = ingest_cve_file(&read(path)?, format).with_context(|| format!("ingesting {}", path.display()))?;
        for w in &parsed.warnings {
            log::warn!("{}: {w}", path.display());
        }
        warnings += parsed.warnings.len();
        for record in &parsed.records {
            match cve_to_review(record) {
                Ok(review) => reviews.push(review),
                Err(e) => {
                    log::warn!("{}: skipping {}: {e}", path.display(), record.cve_id);
                    skipped += 1;
                }
            }
        }
    }
    for path in &args.github {
        let parsed = ingest_github_export(&read(path)?).with_context(|| format!("ingesting {}", path.display()))?;
        for w in &parsed.warnings {
            log::warn!("{}: {w}", path.display());
        }
        warnings += parsed.warnings.len();
        reviews.extend(parsed.reviews);
    }
    let corpus = Corpus::new(reviews)?;
    write_corpus(&corpus, &args.out)?;
    let counts = corpus.counts_by_source();
    log::info!(
        "ingested {} reviews ({} nvd, {} github)",
        corpus.len(),
        counts.nvd,
        counts.github
    );
    Ok(Outcome {
        inputs: args.cve.iter().chain(&args.github).cloned().collect(),
        summary: json!({
            "reviews": corpus.len(),
            "nvd": counts.nvd,
            "github": counts.github,
            "warnings": warnings,
            "skipped": skipped,
        }),
    })
}

pub fn preprocess(args: &PreprocessArgs) -> Result<Outcome> {
    let mut inputs = vec![args.input.clone()];
    let stoplist = load_stoplist(args.stopwords.as_ref(), &mut inputs)?;
    let corpus = read_corpus(&args.input)?;
    let (kept, dropped) = tokenized(corpus.reviews(), &stoplist);
    let tokens: Vec<TokenizedReview> = kept.into_iter().map(|(_, t)| t).collect();
    let mut out = create(&args.out)?;
    corpus::write_jsonl(&tokens, &mut out)?;
    out.flush()?;
    log::info!("preprocessed {} reviews, dropped {dropped} short ones", tokens.len());
    Ok(Outcome {
        inputs,
        summary: json!({ "kept": tokens.len(), "dropped": dropped }),
    })
}

pub fn lexicon(args: &LexiconArgs) -> Result<Outcome> {
    let mut inputs = vec![args.input.clone()];
    let stoplist = load_stoplist(args.stopwords.as_ref(), &mut inputs)?;
    let file = File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
    let tokens: Vec<TokenizedReview> = corpus::read_jsonl(BufReader::new(file))?;
    let catalog = match &args.catalog {
        Some(p) => {
            inputs.push(p.clone());
            VulnerabilityCatalog::from_json(&read(p)?)?
        }
        None => VulnerabilityCatalog::bundled(),
    };
    let score = match args.ranking {
        RankingArg::Tfidf => RankingScore::TfIdfSum,
        RankingArg::Raw => RankingScore::RawFrequency,
    };
    let ranked = lexicon::build_ranked_terms(&catalog.preprocessed(&stoplist), &tokens, args.top_k, score)?;

    if args.rank_only {
        let mut out = create(&args.out)?;
        writeln!(out, "term,score,doc_frequency,rank")?;
        for r in &ranked {
            writeln!(out, "{},{},{},{}", r.term, r.tf_sum, r.doc_frequency, r.rank)?;
        }
        out.flush()?;
        return Ok(Outcome {
            inputs,
            summary: json!({ "ranked": ranked.len() }),
        });
    }

    let mapping = match &args.mapping {
        Some(p) => {
            inputs.push(p.clone());
            PriorityMapping::from_csv(&read(p)?[..])?
        }
        None => PriorityMapping::bundled(),
    };
    let lexicon = lexicon::assign_priorities(&ranked, &mapping, args.top_k)?;
    let mut out = create(&args.out)?;
    lexicon.write_csv(&mut out)?;
    out.flush()?;
    let mut per_level = serde_json::Map::new();
    for level in PriorityLevel::ALL {
        let n = lexicon.entries().iter().filter(|e| e.priority == level).count();
        per_level.insert(level.as_str().into(), n.into());
    }
    Ok(Outcome {
        inputs,
        summary: json!({ "terms": lexicon.len(), "version": lexicon.version(), "per_priority": per_level }),
    })
}

pub fn label(args: &LabelArgs) -> Result<Outcome> {
    let mut inputs = vec![args.input.clone(), args.lexicon.clone()];
    let stoplist = load_stoplist(args.stopwords.as_ref(), &mut inputs)?;
    let corpus = read_corpus(&args.input)?;
    let lexicon = Lexicon::read_csv(&read(&args.lexicon)?[..]).context("reading lexicon")?;
    let tokens: Vec<TokenizedReview> = tokenized(corpus.reviews(), &stoplist)
        .0
        .into_iter()
        .map(|(_, t)| t)
        .collect();
    let (labeled, summary) = lexicon::auto_label_corpus(&corpus, &tokens, &lexicon)?;
    write_corpus(&labeled, &args.out)?;
    log::info!(
        "labeled {}, unmatched {}, skipped {}",
        summary.labeled,
        summary.unmatched,
        summary.skipped
    );
    Ok(Outcome {
        inputs,
        summary: json!({ "lexicon_version": lexicon.version(), "counts": summary }),
    })
}

pub fn split(args: &SplitArgs) -> Result<Outcome> {
    let corpus = read_corpus(&args.input)?;
    let total = corpus.len();
    let labeled: Vec<CodeReview> = corpus
        .into_reviews()
        .into_iter()
        .filter(|r| r.label.is_some())
        .collect();
    let unlabeled = total - labeled.len();
    if unlabeled > 0 {
        log::info!("leaving out {unlabeled} unlabeled reviews");
    }
    let mode = if args.stratified {
        SplitMode::StratifiedByLabel
    } else {
        SplitMode::Shuffled
    };
    let (train, test) = split_corpus(&Corpus::new(labeled)?, args.train_fraction, args.seed, mode)?;
    write_corpus(&train, &args.out.join("train.jsonl"))?;
    write_corpus(&test, &args.out.join("test.jsonl"))?;
    Ok(Outcome {
        inputs: vec![args.input.clone()],
        summary: json!({ "train": train.len(), "test": test.len(), "unlabeled_left_out": unlabeled }),
    })
}

fn examples(corpus: &Corpus, stoplist: &Stoplist, dim: usize) -> Result<(Vec<Example>, usize)> {
    let mut unlabeled = 0;
    let labeled = corpus.reviews().iter().filter(|r| {
        let keep = r.label.is_some();
        unlabeled += usize::from(!keep);
        keep
    });
    let (kept, dropped) = tokenized(labeled, stoplist);
    if unlabeled > 0 {
        log::warn!("ignoring {unlabeled} unlabeled reviews");
    }
    let examples = kept
        .into_iter()
        .map(|(review, t)| {
            Ok(Example {
                features: vectorize(&t.tokens, dim)?,
                label: review.label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((examples, dropped))
}

pub fn train(args: &TrainArgs) -> Result<Outcome> {
    let mut inputs = vec![args.input.clone()];
    let stoplist = load_stoplist(args.stopwords.as_ref(), &mut inputs)?;
    let corpus = read_corpus(&args.input)?;
    let (train_corpus, validation_corpus) = match &args.validation {
        Some(p) => {
            inputs.push(p.clone());
            (corpus, read_corpus(p)?)
        }
        None => split_corpus(&corpus, 1.0 - args.validation_fraction, args.seed, SplitMode::Shuffled)
            .context("carving out the validation set")?,
    };
    let (train_set, dropped_train) = examples(&train_corpus, &stoplist, args.dim)?;
    let (validation_set, dropped_val) = examples(&validation_corpus, &stoplist, args.dim)?;
    log::info!(
        "training on {} examples, validating on {}",
        train_set.len(),
        validation_set.len()
    );

    let config = TrainConfig {
        epochs: args.epochs,
        batch_size: args.batch,
        learning_rate: args.learning_rate,
        seed: args.seed,
        ..TrainConfig::default()
    };
    let model = classifier::init_model(args.dim, args.seed)?;
    let (best, history) = classifier::train(model, &train_set, &validation_set, &config)?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    classifier::save_checkpoint(&best.model, &args.out)?;

    let mut history_path = args.out.as_os_str().to_owned();
    history_path.push(".history.json");
    write_json(
        &json!({
            "config": config,
            "best_epoch": best.epoch,
            "best_validation_accuracy": best.validation_accuracy,
            "epochs": history.epochs,
        }),
        Path::new(&history_path),
    )?;
    Ok(Outcome {
        inputs,
        summary: json!({
            "train_examples": train_set.len(),
            "validation_examples": validation_set.len(),
            "dropped_short": dropped_train + dropped_val,
            "best_epoch": best.epoch,
            "best_validation_accuracy": best.validation_accuracy,
        }),
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Probabilities {
    pub low: f64,
    pub medium: f64,
    pub high: f64,
    pub critical: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Prediction {
    pub review_id: String,
    pub label: PriorityLevel,
    pub probabilities: Probabilities,
}

pub fn predict(args: &PredictArgs) -> Result<Outcome> {
    let mut inputs = vec![args.model.clone(), args.input.clone()];
    let stoplist = load_stoplist(args.stopwords.as_ref(), &mut inputs)?;
    let model = match args.dim {
        Some(dim) => classifier::load_checkpoint_expecting(&args.model, dim)?,
        None => classifier::load_checkpoint(&args.model)?,
    };
    let corpus = read_corpus(&args.input)?;
    let (kept, dropped) = tokenized(corpus.reviews(), &stoplist);
    let mut predictions = Vec::with_capacity(kept.len());
    for (review, tokens) in &kept {
        let (label, [low, medium, high, critical]) = classifier::predict(&model, tokens)?;
        predictions.push(Prediction {
            review_id: review.id.clone(),
            label,
            probabilities: Probabilities {
                low,
                medium,
                high,
                critical,
            },
        });
    }
    let mut out = create(&args.out)?;
    corpus::write_jsonl(&predictions, &mut out)?;
    out.flush()?;
    Ok(Outcome {
        inputs,
        summary: json!({ "predicted": predictions.len(), "dropped_short": dropped }),
    })
}

pub fn evaluate(args: &EvaluateArgs) -> Result<Outcome> {
    let file = File::open(&args.predictions).with_context(|| format!("opening {}", args.predictions.display()))?;
    let predictions: Vec<Prediction> = corpus::read_jsonl(BufReader::new(file))?;
    let corpus = read_corpus(&args.input)?;
    let truth: HashMap<&str, PriorityLevel> = corpus
        .reviews()
        .iter()
        .filter_map(|r| r.label.map(|l| (r.id.as_str(), l)))
        .collect();

    let (mut predicted, mut actual) = (Vec::new(), Vec::new());
    let mut unmatched = 0;
    for p in &predictions {
        match truth.get(p.review_id.as_str()) {
            Some(&label) => {
                predicted.push(p.label);
                actual.push(label);
            }
            None => unmatched += 1,
        }
    }
    if unmatched > 0 {
        log::warn!("{unmatched} predictions have no labeled counterpart");
    }
    let matrix = eval::confusion(&predicted, &actual).context("no prediction matched a labeled review")?;
    let report = eval::metrics(&matrix)?;
    print!("{}", report.to_text());
    if let Some(path) = &args.confusion {
        let mut out = create(path)?;
        matrix.write_csv(&mut out)?;
        out.flush()?;
    }
    write_json(&json!({ "metrics": report, "confusion": matrix }), &args.out)?;
    Ok(Outcome {
        inputs: vec![args.predictions.clone(), args.input.clone()],
        summary: json!({ "evaluated": actual.len(), "unmatched": unmatched, "accuracy": report.accuracy }),
    })
}

pub fn kappa(args: &KappaArgs) -> Result<Outcome> {
    let a = read_corpus(&args.a)?;
    let b = read_corpus(&args.b)?;
    let b_labels: HashMap<&str, PriorityLevel> = b
        .reviews()
        .iter()
        .filter_map(|r| r.label.map(|l| (r.id.as_str(), l)))
        .collect();
    let (mut la, mut lb) = (Vec::new(), Vec::new());
    for review in a.reviews() {
        if let (Some(x), Some(&y)) = (review.label, b_labels.get(review.id.as_str())) {
            la.push(x);
            lb.push(y);
        }
    }
    let kappa = eval::cohen_kappa(&la, &lb).context("no review is labeled in both corpora")?;
    let agreement = la.iter().zip(&lb).filter(|(x, y)| x == y).count();
    println!("kappa {kappa:.4} over {} reviews", la.len());
    write_json(
        &json!({ "kappa": kappa, "compared": la.len(), "agreements": agreement }),
        &args.out,
    )?;
    Ok(Outcome {
        inputs: vec![args.a.clone(), args.b.clone()],
        summary: json!({ "kappa": kappa, "compared": la.len() }),
    })
}

pub fn zeroday(args: &ZerodayArgs) -> Result<Outcome> {
    let mut inputs = vec![args.input.clone()];
    let format = cve_format(args.format, &args.input)?;
    let parsed = ingest_cve_file(&read(&args.input)?, format)?;
    for w in &parsed.warnings {
        log::warn!("{}: {w}", args.input.display());
    }
    let exclusions = if args.no_exclusions {
        Default::default()
    } else if let Some(p) = &args.exclusions {
        inputs.push(p.clone());
        zeroday::parse_exclusions(&String::from_utf8(read(p)?).context("exclusion list is not UTF-8")?)
    } else {
        zeroday::parse_exclusions(zeroday::SAMPLE_EXCLUSIONS)
    };
    let policy = TimelinePolicy {
        patch_before_zero_day: !args.zero_day_first,
    };
    let stats = zeroday::zero_day_stats_with(&parsed.records, &exclusions, policy)?;
    if let Some(path) = &args.verdicts {
        let mut out = create(path)?;
        zeroday::write_verdicts_csv(&parsed.records, policy, &mut out)?;
        out.flush()?;
    }
    for share in &stats.verdicts {
        println!(
            "{:<28} {:>6} {:>7.2}%",
            share.verdict.as_str(),
            share.count,
            share.percentage
        );
    }
    write_json(&stats, &args.out)?;
    Ok(Outcome {
        inputs,
        summary: json!({ "records": parsed.records.len(), "analysed": stats.total, "excluded": stats.excluded.len(), "warnings": parsed.warnings.len() }),
    })
}
