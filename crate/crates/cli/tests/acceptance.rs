//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Expected values come from independent re-computation (naive loops, direct
//! formulas, finite differences) rather than from the code under test.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use triage_core::classifier::synthetic::planted_keyword_samples;
use triage_core::classifier::{self, evaluate, gradients, init_model, softmax, Example, TrainConfig};
use triage_core::corpus::{ingest_cve_file, CveFormat};
use triage_core::eval::{cohen_kappa, confusion, f1_score, macro_average, metrics, ConfusionMatrix};
use triage_core::features::{fnv1a_64, hash_token, vectorize};
use triage_core::lexicon::{auto_label, inverse_document_frequency, tf_idf, Lexicon, LexiconEntry};
use triage_core::preprocess::TokenizedReview;
use triage_core::zeroday::{self, TimelineVerdict};
use triage_core::PriorityLevel;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn review(id: usize, tokens: Vec<String>) -> TokenizedReview {
    TokenizedReview {
        review_id: format!("r{id}"),
        original_token_count: tokens.len(),
        tokens,
    }
}

// 1. Confusion matrix and metric identities.
fn metric_identities() -> Check {
    use PriorityLevel::*;
    // Published figures: critical-class P/R and the four per-class F1 scores.
    let f1 = f1_score(0.95, 0.99);
    ensure!(close(f1, 0.97, 0.005), "f1(0.95, 0.99) = {f1}");
    let macro_f1 = macro_average(&[0.83, 0.82, 0.86, 0.97]);
    ensure!(close(macro_f1, 0.87, 0.005), "macro f1 {macro_f1}");

    // Hand example: rows actual, columns predicted.
    let actual = [Low, Low, Low, Medium, Medium, High, High, High, Critical, Critical];
    let predicted = [Low, Low, Medium, Medium, High, High, High, Low, Critical, Medium];
    let m = confusion(&predicted, &actual).map_err(|e| e.to_string())?;
    ensure!(
        m.get(Low, Medium) == 1 && m.get(High, Low) == 1,
        "cell placement {:?}",
        m.counts
    );
    let r = metrics(&m).map_err(|e| e.to_string())?;
    ensure!(close(r.accuracy, 0.6, 1e-12), "accuracy {}", r.accuracy);
    // low: tp 2, predicted 3, actual 3.
    ensure!(close(r.class(Low).precision, 2.0 / 3.0, 1e-12), "low precision");
    // medium: tp 1, predicted 3, actual 2.
    ensure!(close(r.class(Medium).precision, 1.0 / 3.0, 1e-12), "medium precision");
    ensure!(close(r.class(Medium).recall, 0.5, 1e-12), "medium recall");
    ensure!(
        close(r.class(Medium).f1, 0.4, 1e-12),
        "medium f1 {}",
        r.class(Medium).f1
    );

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let mut counts = [[0u64; 4]; 4];
        for row in &mut counts {
            for c in row.iter_mut() {
                *c = if rng.gen_bool(0.2) { 0 } else { rng.gen_range(0..30) };
            }
        }
        let m = ConfusionMatrix { counts };
        let n: u64 = counts.iter().flatten().sum();
        if n == 0 {
            continue;
        }
        let r = metrics(&m).map_err(|e| e.to_string())?;
        let trace: u64 = (0..4).map(|i| counts[i][i]).sum();
        ensure!(close(r.accuracy, trace as f64 / n as f64, 1e-12), "accuracy identity");
        let mut p_sum = 0.0;
        let mut r_sum = 0.0;
        let mut f_sum = 0.0;
        for (k, c) in r.per_class.iter().enumerate() {
            ensure!(
                c.true_positives + c.false_positives + c.false_negatives + c.true_negatives == n,
                "tp+fp+fn+tn"
            );
            let col: u64 = (0..4).map(|i| counts[i][k]).sum();
            let row: u64 = counts[k].iter().sum();
            let p = if col == 0 {
                0.0
            } else {
                counts[k][k] as f64 / col as f64
            };
            let rc = if row == 0 {
                0.0
            } else {
                counts[k][k] as f64 / row as f64
            };
            let f = if p + rc == 0.0 { 0.0 } else { 2.0 * p * rc / (p + rc) };
            ensure!(
                close(c.precision, p, 1e-12) && close(c.recall, rc, 1e-12) && close(c.f1, f, 1e-12),
                "class {k}"
            );
            ensure!(
                c.precision_undefined == (col == 0) && c.recall_undefined == (row == 0),
                "undefined flags"
            );
            ensure!((0.0..=1.0).contains(&c.f1), "f1 range");
            p_sum += p;
            r_sum += rc;
            f_sum += f;
        }
        ensure!(close(r.macro_precision, p_sum / 4.0, 1e-12), "macro precision");
        ensure!(close(r.macro_recall, r_sum / 4.0, 1e-12), "macro recall");
        ensure!(close(r.macro_f1, f_sum / 4.0, 1e-12), "macro f1");
    }
    Ok(())
}

// 2. TF-IDF against a brute-force oracle.
fn tf_idf_oracle() -> Check {
    let vocab = ["reentranc", "overflow", "ga", "call", "owner", "token", "drain", "loop"];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    // Ten reviews that all mention "contract": its idf must be exactly zero.
    let fixed: Vec<TokenizedReview> = (0..10)
        .map(|i| {
            let mut t = vec!["contract".to_string()];
            t.extend((0..6).map(|_| vocab[rng.gen_range(0..vocab.len())].to_string()));
            review(i, t)
        })
        .collect();
    let idf = inverse_document_frequency("contract", &fixed).map_err(|e| e.to_string())?;
    ensure!(idf == 0.0, "idf of a ubiquitous term is {idf}");
    for r in &fixed {
        ensure!(
            tf_idf("contract", r, &fixed).unwrap() == 0.0,
            "tf-idf of a ubiquitous term"
        );
    }

    for round in 0..50 {
        let n_docs = if round == 0 { 10 } else { rng.gen_range(1..20) };
        let docs: Vec<Vec<String>> = (0..n_docs)
            .map(|_| {
                (0..rng.gen_range(0..15))
                    .map(|_| vocab[rng.gen_range(0..vocab.len())].to_string())
                    .collect()
            })
            .collect();
        let corpus: Vec<TokenizedReview> = docs.iter().cloned().enumerate().map(|(i, d)| review(i, d)).collect();
        for term in vocab.iter().chain(&["absent"]) {
            let df = docs.iter().filter(|d| d.iter().any(|t| t == term)).count() as f64;
            let idf = ((docs.len() as f64 + 1.0) / (df + 1.0)).ln();
            for (d, r) in docs.iter().zip(&corpus) {
                let tf = d.iter().filter(|t| t == term).count() as f64;
                let got = tf_idf(term, r, &corpus).map_err(|e| e.to_string())?;
                let want = tf * idf;
                ensure!((got - want).abs() <= 1e-12 * want.abs(), "{term}: {got} vs {want}");
            }
        }
    }
    Ok(())
}

// 3. Hashing conserves token counts and stays in range.
fn hashing_conservation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..1000 {
        let dim = [1, 2, 17, 1000, 10_000][i % 5];
        let tokens: Vec<String> = (0..rng.gen_range(0..60))
            .map(|_| {
                (0..rng.gen_range(1..9))
                    .map(|_| rng.gen_range(b'a'..=b'z') as char)
                    .collect()
            })
            .collect();
        let v = vectorize(&tokens, dim).map_err(|e| e.to_string())?;
        ensure!(v.dim() == dim, "dim");
        ensure!(
            v.values().iter().sum::<f64>() == tokens.len() as f64,
            "mass not conserved"
        );
        let mut expected = vec![0.0; dim];
        for t in &tokens {
            let idx = (fnv1a_64(t.as_bytes()) % dim as u64) as usize;
            ensure!(hash_token(t, dim).map_err(|e| e.to_string())? == idx, "index of {t}");
            expected[idx] += 1.0;
        }
        ensure!(v.values() == &expected[..], "vector differs from counting oracle");

        let mut shuffled = tokens.clone();
        shuffled.shuffle(&mut rng);
        ensure!(vectorize(&shuffled, dim).unwrap() == v, "not permutation invariant");
        let cut = rng.gen_range(0..=tokens.len());
        let (a, b) = (
            vectorize(&tokens[..cut], dim).unwrap(),
            vectorize(&tokens[cut..], dim).unwrap(),
        );
        let sum: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect();
        ensure!(v.values() == &sum[..], "not additive over concatenation");
    }
    Ok(())
}

// 4. Backpropagation agrees with central finite differences.
fn gradient_check() -> Check {
    let mut model = init_model(20, 4).map_err(|e| e.to_string())?;
    model.dropout_rate = 0.0;
    let data: Vec<Example> = [
        (&["a", "b", "c"][..], PriorityLevel::Low),
        (&["d", "e", "a", "a"][..], PriorityLevel::High),
    ]
    .iter()
    .map(|(t, l)| Example::new(vectorize(t, 20).unwrap(), *l))
    .collect();
    let refs: Vec<&Example> = data.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let analytic = gradients(&model, &refs, &mut rng).map_err(|e| e.to_string())?.gradients;
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for k in 0..6 {
        let n = model.parameters()[k].len();
        for i in 0..n {
            let orig = model.parameters()[k][i];
            model.parameters_mut()[k][i] = orig + h;
            let plus = evaluate(&model, &data).unwrap().0;
            model.parameters_mut()[k][i] = orig - h;
            let minus = evaluate(&model, &data).unwrap().0;
            model.parameters_mut()[k][i] = orig;
            let numeric = (plus - minus) / (2.0 * h);
            let a = analytic.buffers[k][i];
            worst = worst.max((a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-7));
            checked += 1;
        }
    }
    ensure!(checked == model.parameter_count(), "checked {checked} parameters");
    ensure!(worst <= 1e-4, "worst relative error {worst:e}");
    Ok(())
}

// 5. Softmax sums to one and ignores constant shifts.
fn softmax_contract() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10_000 {
        let z: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-40.0..40.0));
        let p = softmax(&z);
        ensure!(close(p.iter().sum(), 1.0, 1e-9), "sum {:?}", p);
        ensure!(p.iter().all(|v| (0.0..=1.0).contains(v)), "range {:?}", p);
        let c = rng.gen_range(-1000.0..1000.0);
        let q = softmax(&z.map(|v| v + c));
        ensure!(p.iter().zip(&q).all(|(a, b)| close(*a, *b, 1e-9)), "shift {c}");
    }
    Ok(())
}

// 6. Training on planted keywords: accurate and bitwise reproducible.
fn training_smoke() -> Check {
    let samples = planted_keyword_samples(500, 6);
    let to_examples = |s: &[(Vec<String>, PriorityLevel)]| -> Vec<Example> {
        s.iter()
            .map(|(t, l)| Example::new(vectorize(t, 10_000).unwrap(), *l))
            .collect()
    };
    let (train_set, val_set) = (to_examples(&samples[..400]), to_examples(&samples[400..]));
    let config = TrainConfig {
        seed: 6,
        ..TrainConfig::default()
    };
    let run = || classifier::train(init_model(10_000, 6).unwrap(), &train_set, &val_set, &config);
    let (best, history) = run().map_err(|e| e.to_string())?;
    ensure!(
        best.validation_accuracy >= 0.95,
        "validation accuracy {}",
        best.validation_accuracy
    );
    let (best2, history2) = run().map_err(|e| e.to_string())?;
    let bits = |h: &classifier::TrainingHistory| -> Vec<u64> {
        h.epochs
            .iter()
            .flat_map(|e| [e.train_loss, e.train_accuracy, e.validation_loss, e.validation_accuracy])
            .map(f64::to_bits)
            .collect()
    };
    ensure!(bits(&history) == bits(&history2), "history not bitwise identical");
    ensure!(best == best2, "best checkpoint differs between runs");
    Ok(())
}

// 7. Lexicon auto-labeling reproduces the hand labels of a 40-review fixture.
fn auto_label_fixture() -> Check {
    #[derive(serde::Deserialize)]
    struct Term {
        term: String,
        priority: PriorityLevel,
    }
    #[derive(serde::Deserialize)]
    struct Labeled {
        id: String,
        tokens: Vec<String>,
        label: Option<PriorityLevel>,
    }
    #[derive(serde::Deserialize)]
    struct Fixture {
        lexicon: Vec<Term>,
        reviews: Vec<Labeled>,
    }
    let text = std::fs::read_to_string(fixture("auto_label.json")).map_err(|e| e.to_string())?;
    let fx: Fixture = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let entries = fx
        .lexicon
        .iter()
        .enumerate()
        .map(|(i, t)| LexiconEntry {
            term: t.term.clone(),
            priority: t.priority,
            weight: 1.0,
            rank: i + 1,
        })
        .collect();
    let lexicon = Lexicon::new(entries, 250).map_err(|e| e.to_string())?;
    ensure!(fx.reviews.len() == 40, "fixture has {} reviews", fx.reviews.len());

    let mut multi = 0;
    for r in &fx.reviews {
        let distinct: BTreeSet<PriorityLevel> = fx
            .lexicon
            .iter()
            .filter(|t| r.tokens.contains(&t.term))
            .map(|t| t.priority)
            .collect();
        multi += usize::from(distinct.len() >= 2);
        let tokens = TokenizedReview {
            review_id: r.id.clone(),
            original_token_count: r.tokens.len(),
            tokens: r.tokens.clone(),
        };
        let got = auto_label(&tokens, &lexicon).map_err(|e| e.to_string())?;
        ensure!(got == r.label, "{}: {got:?} vs hand label {:?}", r.id, r.label);
    }
    ensure!(multi >= 5, "only {multi} multi-priority reviews");
    let empty = Lexicon::new(vec![], 250).map_err(|e| e.to_string())?;
    ensure!(
        auto_label(&review(0, vec!["reentranc".into()]), &empty).is_err(),
        "empty lexicon accepted"
    );
    Ok(())
}

// 8. Cohen's kappa.
fn kappa_values() -> Check {
    // 2x2 table [[20, 5], [10, 15]]: po = 0.7, pe = 0.5*0.6 + 0.5*0.4 = 0.5.
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (x, y, n) in [(0, 0, 20), (0, 1, 5), (1, 0, 10), (1, 1, 15)] {
        for _ in 0..n {
            a.push(x);
            b.push(y);
        }
    }
    let k = cohen_kappa(&a, &b).map_err(|e| e.to_string())?;
    ensure!(
        cohen_kappa(&b, &b).unwrap() == 1.0,
        "identical streams must give exactly 1"
    );
    ensure!(close(k, 0.4, 1e-12), "kappa {k}");
    ensure!(close(cohen_kappa(&a, &a).unwrap(), 1.0, 1e-12), "self agreement");
    ensure!(cohen_kappa(&a, &b[1..]).is_err(), "length mismatch accepted");

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let la: Vec<PriorityLevel> = (0..10_000).map(|_| PriorityLevel::ALL[rng.gen_range(0..4)]).collect();
    let lb: Vec<PriorityLevel> = (0..10_000).map(|_| PriorityLevel::ALL[rng.gen_range(0..4)]).collect();
    let chance = cohen_kappa(&la, &lb).map_err(|e| e.to_string())?;
    ensure!(chance.abs() < 0.05, "independent labelings give kappa {chance}");

    for _ in 0..200 {
        let n = rng.gen_range(1..60);
        let la: Vec<PriorityLevel> = (0..n).map(|_| PriorityLevel::ALL[rng.gen_range(0..4)]).collect();
        let lb: Vec<PriorityLevel> = (0..n).map(|_| PriorityLevel::ALL[rng.gen_range(0..4)]).collect();
        let nf = n as f64;
        let po = la.iter().zip(&lb).filter(|(x, y)| x == y).count() as f64 / nf;
        let pe: f64 = PriorityLevel::ALL
            .iter()
            .map(|c| {
                let ca = la.iter().filter(|x| *x == c).count() as f64;
                let cb = lb.iter().filter(|x| *x == c).count() as f64;
                ca * cb / (nf * nf)
            })
            .sum();
        let want = if pe == 1.0 { 1.0 } else { (po - pe) / (1.0 - pe) };
        let got = cohen_kappa(&la, &lb).map_err(|e| e.to_string())?;
        ensure!(close(got, want, 1e-12), "kappa {got} vs {want}");
        ensure!(got <= 1.0 + 1e-12, "kappa above one");
    }
    Ok(())
}

// 9. Zero-day timeline classification and statistics.
fn zero_day_fixture() -> Check {
    use TimelineVerdict::*;
    let bytes = std::fs::read(fixture("cve.json")).map_err(|e| e.to_string())?;
    let parsed = ingest_cve_file(&bytes, CveFormat::Json).map_err(|e| e.to_string())?;
    ensure!(parsed.records.len() == 11, "records {}", parsed.records.len());
    ensure!(parsed.warnings.len() == 1, "warnings {:?}", parsed.warnings);
    let expected = [
        ("CVE-2018-10001", ZeroDay), // exploit on the advisory date
        ("CVE-2018-10002", ZeroDay),
        ("CVE-2018-10003", ExploitedAfterDisclosure),
        ("CVE-2018-10004", NotExploited),
        ("CVE-2018-10005", PatchedBeforeExploit), // patch, never exploited
        ("CVE-2018-10006", PatchedBeforeExploit),
        ("CVE-2018-10007", Uncertain),
        ("CVE-2018-10008", Uncertain), // exploit without any advisory
        ("CVE-2018-10009", ZeroDay),   // patched only after the exploit
        ("CVE-2018-10010", ZeroDay),
    ];
    for (id, verdict) in expected {
        let record = parsed
            .records
            .iter()
            .find(|r| r.cve_id == id)
            .ok_or(format!("{id} missing"))?;
        let got = zeroday::classify_timeline(record);
        ensure!(got == verdict, "{id}: {got} vs {verdict}");
    }
    let exclusions = zeroday::parse_exclusions(zeroday::SAMPLE_EXCLUSIONS);
    let stats = zeroday::zero_day_stats(&parsed.records, &exclusions).map_err(|e| e.to_string())?;
    ensure!(stats.total == 10, "total {}", stats.total);
    ensure!(
        stats.excluded == vec!["CVE-2018-17882".to_string()],
        "excluded {:?}",
        stats.excluded
    );
    for (verdict, count) in [
        (ZeroDay, 4),
        (ExploitedAfterDisclosure, 1),
        (NotExploited, 1),
        (PatchedBeforeExploit, 2),
        (Uncertain, 2),
    ] {
        let share = stats.share(verdict);
        ensure!(share.count == count, "{verdict}: {} vs {count}", share.count);
        ensure!(
            close(share.percentage, count as f64 * 10.0, 1e-12),
            "{verdict} percentage"
        );
    }
    ensure!(
        close(stats.verdicts.iter().map(|s| s.percentage).sum(), 100.0, 1e-9),
        "percentages sum"
    );
    Ok(())
}

fn triage(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_triage"))
        .args(args)
        .env("TRIAGE_LOG", "error")
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "triage {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(())
}

const PIPELINE_OUTPUTS: [&str; 13] = [
    "corpus.jsonl",
    "tokens.jsonl",
    "ranked.csv",
    "lexicon.csv",
    "labeled.jsonl",
    "split/train.jsonl",
    "split/test.jsonl",
    "model.ckpt",
    "model.ckpt.history.json",
    "predictions.jsonl",
    "metrics.json",
    "confusion.csv",
    "zeroday.json",
];

fn run_pipeline(dir: &Path) -> Result<(), String> {
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let cve = fixture("cve.json").to_string_lossy().into_owned();
    let issues = fixture("issues.json").to_string_lossy().into_owned();
    let mapping = fixture("mapping.csv").to_string_lossy().into_owned();
    triage(&[
        "ingest",
        "--cve",
        &cve,
        "--github",
        &issues,
        "--out",
        &p("corpus.jsonl"),
    ])?;
    triage(&["preprocess", "--in", &p("corpus.jsonl"), "--out", &p("tokens.jsonl")])?;
    triage(&[
        "lexicon",
        "--rank-only",
        "--top-k",
        "60",
        "--in",
        &p("tokens.jsonl"),
        "--out",
        &p("ranked.csv"),
    ])?;
    triage(&[
        "lexicon",
        "--top-k",
        "60",
        "--mapping",
        &mapping,
        "--in",
        &p("tokens.jsonl"),
        "--out",
        &p("lexicon.csv"),
    ])?;
    triage(&[
        "label",
        "--in",
        &p("corpus.jsonl"),
        "--lexicon",
        &p("lexicon.csv"),
        "--out",
        &p("labeled.jsonl"),
    ])?;
    triage(&[
        "split",
        "--in",
        &p("labeled.jsonl"),
        "--seed",
        "7",
        "--out",
        &p("split"),
    ])?;
    triage(&[
        "train",
        "--in",
        &p("split/train.jsonl"),
        "--dim",
        "2000",
        "--epochs",
        "3",
        "--batch",
        "8",
        "--seed",
        "7",
        "--out",
        &p("model.ckpt"),
    ])?;
    triage(&[
        "predict",
        "--model",
        &p("model.ckpt"),
        "--dim",
        "2000",
        "--in",
        &p("split/test.jsonl"),
        "--out",
        &p("predictions.jsonl"),
    ])?;
    triage(&[
        "evaluate",
        "--predictions",
        &p("predictions.jsonl"),
        "--in",
        &p("split/test.jsonl"),
        "--confusion",
        &p("confusion.csv"),
        "--out",
        &p("metrics.json"),
    ])?;
    triage(&["zeroday", "--in", &cve, "--out", &p("zeroday.json")])?;
    Ok(())
}

// 10. The CLI pipeline is deterministic end to end.
fn cli_determinism() -> Check {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_pipeline(a.path())?;
    run_pipeline(b.path())?;
    for name in PIPELINE_OUTPUTS {
        let x = std::fs::read(a.path().join(name)).map_err(|e| format!("{name}: {e}"))?;
        let y = std::fs::read(b.path().join(name)).map_err(|e| format!("{name}: {e}"))?;
        ensure!(!x.is_empty(), "{name} is empty");
        ensure!(x == y, "{name} differs between runs");
    }
    for name in ["corpus.jsonl", "lexicon.csv", "model.ckpt", "metrics.json", "split"] {
        let mut manifest = a.path().join(name).into_os_string();
        manifest.push(".manifest.json");
        ensure!(Path::new(&manifest).exists(), "missing manifest for {name}");
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("metric identities", metric_identities),
        ("tf-idf oracle", tf_idf_oracle),
        ("hashing conservation", hashing_conservation),
        ("gradient check", gradient_check),
        ("softmax contract", softmax_contract),
        ("training smoke", training_smoke),
        ("lexicon auto-labeling", auto_label_fixture),
        ("cohen's kappa", kappa_values),
        ("zero-day timelines", zero_day_fixture),
        ("cli determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS {:>2} {name} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
