//! Review and CVE data model, file ingestion and train/test splitting.

mod cve;
mod github;
mod split;

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use cve::{cve_to_review, ingest_cve_file, parse_date, CveFormat, CveIngest, CveRecord};
pub use github::{ingest_github_export, GithubIngest};
pub use split::{split_corpus, SplitMode};

/// Urgency of fixing a weakness. Variant order is the priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PriorityLevel {
    Low,
    Medium,
    High,
    Critical,
}

impl PriorityLevel {
    pub const ALL: [PriorityLevel; 4] = [
        PriorityLevel::Low,
        PriorityLevel::Medium,
        PriorityLevel::High,
        PriorityLevel::Critical,
    ];

    /// Class index used by the classifier: Low=0 .. Critical=3.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PriorityLevel::Low => "low",
            PriorityLevel::Medium => "medium",
            PriorityLevel::High => "high",
            PriorityLevel::Critical => "critical",
        }
    }
}

impl fmt::Display for PriorityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PriorityLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "low" => Ok(PriorityLevel::Low),
            "medium" => Ok(PriorityLevel::Medium),
            "high" => Ok(PriorityLevel::High),
            "critical" => Ok(PriorityLevel::Critical),
            _ => Err(Error::UnknownPriority(s.to_string())),
        }
    }
}

impl Serialize for PriorityLevel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for PriorityLevel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReviewSource {
    Github,
    Nvd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelOrigin {
    #[default]
    None,
    Auto,
    Expert,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeReview {
    pub id: String,
    pub source: ReviewSource,
    pub summary: String,
    pub description: String,
    #[serde(default)]
    pub label: Option<PriorityLevel>,
    #[serde(default)]
    pub label_origin: LabelOrigin,
}

impl CodeReview {
    pub fn new(
        id: impl Into<String>,
        source: ReviewSource,
        summary: impl Into<String>,
        description: impl Into<String>,
    ) -> Self {
        Self {
            id: id.into(),
            source,
            summary: summary.into(),
            description: description.into(),
            label: None,
            label_origin: LabelOrigin::None,
        }
    }

    /// Sets or clears the label, keeping `label_origin` consistent with it.
    pub fn set_label(&mut self, label: Option<PriorityLevel>, origin: LabelOrigin) {
        match label {
            Some(level) if origin != LabelOrigin::None => {
                self.label = Some(level);
                self.label_origin = origin;
            }
            _ => {
                self.label = None;
                self.label_origin = LabelOrigin::None;
            }
        }
    }

    /// Summary and description joined by a single space; the text that
    /// feeds preprocessing.
    pub fn text(&self) -> String {
        format!("{} {}", self.summary, self.description)
    }

    fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::InvalidArgument("review with empty id".into()));
        }
        if self.label.is_some() != (self.label_origin != LabelOrigin::None) {
            return Err(Error::InvalidArgument(format!(
                "review `{}`: label_origin must be `none` exactly when label is absent",
                self.id
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SourceCounts {
    pub github: usize,
    pub nvd: usize,
}

impl SourceCounts {
    pub fn total(&self) -> usize {
        self.github + self.nvd
    }
}

/// An ordered set of reviews with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    reviews: Vec<CodeReview>,
}

impl Corpus {
    pub fn new(reviews: Vec<CodeReview>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(reviews.len());
        for review in &reviews {
            review.validate()?;
            if !seen.insert(review.id.as_str()) {
                return Err(Error::DuplicateId(review.id.clone()));
            }
        }
        Ok(Self { reviews })
    }

    pub fn reviews(&self) -> &[CodeReview] {
        &self.reviews
    }

    pub fn into_reviews(self) -> Vec<CodeReview> {
        self.reviews
    }

    pub fn len(&self) -> usize {
        self.reviews.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reviews.is_empty()
    }

    pub fn counts_by_source(&self) -> SourceCounts {
        let mut counts = SourceCounts::default();
        for review in &self.reviews {
            match review.source {
                ReviewSource::Github => counts.github += 1,
                ReviewSource::Nvd => counts.nvd += 1,
            }
        }
        counts
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for review in &self.reviews {
            serde_json::to_writer(&mut out, review)?;
            out.write_all(b"\n").map_err(|e| Error::io("<corpus>", e))?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let reviews = read_jsonl(input)?;
        Self::new(reviews)
    }
}

/// Reads one JSON value per non-blank line.
pub fn read_jsonl<T, R>(input: R) -> Result<Vec<T>>
where
    T: for<'de> Deserialize<'de>,
    R: BufRead,
{
    let mut items = Vec::new();
    for (index, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<jsonl>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| Error::Format {
            index,
            message: e.to_string(),
        })?;
        items.push(item);
    }
    Ok(items)
}

pub fn write_jsonl<T: Serialize, W: Write>(items: &[T], mut out: W) -> Result<()> {
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n").map_err(|e| Error::io("<jsonl>", e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priority_order_is_total() {
        use PriorityLevel::*;
        assert!(Low < Medium && Medium < High && High < Critical);
        assert_eq!(PriorityLevel::ALL.iter().max(), Some(&Critical));
    }

    #[test]
    fn priority_parse_is_case_insensitive() {
        assert_eq!("CRITICAL".parse::<PriorityLevel>().unwrap(), PriorityLevel::Critical);
        assert_eq!("Medium".parse::<PriorityLevel>().unwrap(), PriorityLevel::Medium);
        assert!("urgent".parse::<PriorityLevel>().is_err());
        assert!("".parse::<PriorityLevel>().is_err());
        assert_eq!(serde_json::to_string(&PriorityLevel::High).unwrap(), "\"high\"");
        let parsed: PriorityLevel = serde_json::from_str("\"LOW\"").unwrap();
        assert_eq!(parsed, PriorityLevel::Low);
    }

    #[test]
    fn index_round_trip() {
        for level in PriorityLevel::ALL {
            assert_eq!(PriorityLevel::from_index(level.index()), Some(level));
        }
        assert_eq!(PriorityLevel::from_index(4), None);
    }

    #[test]
    fn corpus_rejects_duplicate_ids() {
        let a = CodeReview::new("x", ReviewSource::Github, "s", "d");
        let err = Corpus::new(vec![a.clone(), a]).unwrap_err();
        assert!(matches!(err, Error::DuplicateId(id) if id == "x"));
    }

    #[test]
    fn corpus_rejects_inconsistent_label_origin() {
        let mut review = CodeReview::new("x", ReviewSource::Nvd, "s", "d");
        review.label = Some(PriorityLevel::High);
        assert!(Corpus::new(vec![review.clone()]).is_err());
        review.label = None;
        review.label_origin = LabelOrigin::Auto;
        assert!(Corpus::new(vec![review]).is_err());
    }

    #[test]
    fn set_label_keeps_origin_consistent() {
        let mut review = CodeReview::new("x", ReviewSource::Nvd, "s", "d");
        review.set_label(Some(PriorityLevel::Low), LabelOrigin::None);
        assert_eq!(review.label, None);
        assert_eq!(review.label_origin, LabelOrigin::None);
        review.set_label(Some(PriorityLevel::Low), LabelOrigin::Expert);
        assert_eq!(review.label, Some(PriorityLevel::Low));
        review.set_label(None, LabelOrigin::Expert);
        assert_eq!(review.label_origin, LabelOrigin::None);
    }

    #[test]
    fn counts_sum_to_total() {
        let corpus = Corpus::new(vec![
            CodeReview::new("a", ReviewSource::Github, "", ""),
            CodeReview::new("b", ReviewSource::Nvd, "", ""),
            CodeReview::new("c", ReviewSource::Github, "", ""),
        ])
        .unwrap();
        let counts = corpus.counts_by_source();
        assert_eq!(counts, SourceCounts { github: 2, nvd: 1 });
        assert_eq!(counts.total(), corpus.len());
    }

    #[test]
    fn jsonl_round_trip() {
        let mut labeled = CodeReview::new("b", ReviewSource::Nvd, "sum", "desc \"quoted\"\nnext");
        labeled.set_label(Some(PriorityLevel::Critical), LabelOrigin::Auto);
        let corpus = Corpus::new(vec![CodeReview::new("a", ReviewSource::Github, "s", "d"), labeled]).unwrap();
        let mut buf = Vec::new();
        corpus.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.contains("\"label\":\"critical\""));
        assert_eq!(Corpus::read_jsonl(&buf[..]).unwrap(), corpus);
    }
}
