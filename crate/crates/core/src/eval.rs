//! Confusion matrix, per-class and macro metrics, Cohen's kappa.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::PriorityLevel;
use crate::error::{Error, Result};

const K: usize = PriorityLevel::ALL.len();

/// Rows are actual classes, columns predicted classes, both in
/// Low..Critical order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; K]; K],
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn get(&self, actual: PriorityLevel, predicted: PriorityLevel) -> u64 {
        self.counts[actual.index()][predicted.index()]
    }

    pub fn trace(&self) -> u64 {
        (0..K).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sum(&self, class: PriorityLevel) -> u64 {
        self.counts[class.index()].iter().sum()
    }

    pub fn column_sum(&self, class: PriorityLevel) -> u64 {
        self.counts.iter().map(|row| row[class.index()]).sum()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut text = String::from("actual\\predicted");
        for level in PriorityLevel::ALL {
            let _ = write!(text, ",{level}");
        }
        text.push('\n');
        for actual in PriorityLevel::ALL {
            text.push_str(actual.as_str());
            for predicted in PriorityLevel::ALL {
                let _ = write!(text, ",{}", self.get(actual, predicted));
            }
            text.push('\n');
        }
        out.write_all(text.as_bytes()).map_err(|e| Error::io("<confusion>", e))
    }
}

pub fn confusion(predicted: &[PriorityLevel], actual: &[PriorityLevel]) -> Result<ConfusionMatrix> {
    if predicted.len() != actual.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: actual.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::Empty("label lists"));
    }
    let mut matrix = ConfusionMatrix::default();
    for (p, a) in predicted.iter().zip(actual) {
        matrix.counts[a.index()][p.index()] += 1;
    }
    Ok(matrix)
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Unweighted mean.
pub fn macro_average(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: PriorityLevel,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    /// No predictions of this class: precision reported as 0.
    pub precision_undefined: bool,
    /// No actual instances of this class: recall reported as 0.
    pub recall_undefined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub per_class: Vec<ClassMetrics>,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub total: u64,
}

impl MetricsReport {
    pub fn class(&self, level: PriorityLevel) -> &ClassMetrics {
        &self.per_class[level.index()]
    }

    /// Aligned-column plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:>9} {:>9} {:>9} {:>9}",
            "class", "precision", "recall", "f1", "support"
        );
        for m in &self.per_class {
            let flag = |undefined: bool| if undefined { "*" } else { " " };
            let _ = writeln!(
                out,
                "{:<10} {:>8.4}{} {:>8.4}{} {:>9.4} {:>9}",
                m.class.as_str(),
                m.precision,
                flag(m.precision_undefined),
                m.recall,
                flag(m.recall_undefined),
                m.f1,
                m.support
            );
        }
        let _ = writeln!(
            out,
            "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>9}",
            "macro", self.macro_precision, self.macro_recall, self.macro_f1, self.total
        );
        let _ = writeln!(out, "{:<10} {:>9.4}", "accuracy", self.accuracy);
        if self
            .per_class
            .iter()
            .any(|m| m.precision_undefined || m.recall_undefined)
        {
            let _ = writeln!(out, "* undefined (zero denominator), reported as 0");
        }
        out
    }
}

/// One-vs-rest per-class metrics, global accuracy (trace / total) and
/// unweighted macro averages.
pub fn metrics(matrix: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = matrix.total();
    if total == 0 {
        return Err(Error::Empty("confusion matrix"));
    }
    let per_class: Vec<ClassMetrics> = PriorityLevel::ALL
        .iter()
        .map(|&class| {
            let tp = matrix.get(class, class);
            let predicted = matrix.column_sum(class);
            let actual = matrix.row_sum(class);
            let fp = predicted - tp;
            let fn_ = actual - tp;
            let tn = total - tp - fp - fn_;
            let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, actual);
            ClassMetrics {
                class,
                true_positives: tp,
                false_positives: fp,
                false_negatives: fn_,
                true_negatives: tn,
                precision,
                recall,
                f1: f1_score(precision, recall),
                support: actual,
                precision_undefined: predicted == 0,
                recall_undefined: actual == 0,
            }
        })
        .collect();

    let collect = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).collect::<Vec<_>>();
    Ok(MetricsReport {
        accuracy: matrix.trace() as f64 / total as f64,
        macro_precision: macro_average(&collect(|m| m.precision)),
        macro_recall: macro_average(&collect(|m| m.recall)),
        macro_f1: macro_average(&collect(|m| m.f1)),
        total,
        per_class,
    })
}

/// Chance-corrected agreement between two label streams of any label type.
pub fn cohen_kappa<L: Ord>(labels_a: &[L], labels_b: &[L]) -> Result<f64> {
    if labels_a.len() != labels_b.len() {
        return Err(Error::LengthMismatch {
            left: labels_a.len(),
            right: labels_b.len(),
        });
    }
    if labels_a.is_empty() {
        return Err(Error::Empty("label lists"));
    }
    let n = labels_a.len() as f64;
    let mut marginals: BTreeMap<&L, (u64, u64)> = BTreeMap::new();
    let mut agree = 0u64;
    for (a, b) in labels_a.iter().zip(labels_b) {
        marginals.entry(a).or_default().0 += 1;
        marginals.entry(b).or_default().1 += 1;
        if a == b {
            agree += 1;
        }
    }
    let observed = agree as f64 / n;
    let expected: f64 = marginals
        .values()
        .map(|&(ca, cb)| (ca as f64 / n) * (cb as f64 / n))
        .sum();
    if expected == 1.0 {
        // Both raters used one identical label throughout.
        return Ok(1.0);
    }
    Ok((observed - expected) / (1.0 - expected))
}
