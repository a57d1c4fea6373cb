//! Priority-annotated weakness lexicon and lexicon-based auto-labeling.
//!
//! Construction: preprocess the reviews and the vulnerability catalog, score
//! every candidate term by TF-IDF summed over the corpus, keep the top K, then
//! attach a priority to each kept term from an expert mapping file.

mod scoring;

use std::collections::{BTreeSet, HashMap};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, LabelOrigin, PriorityLevel};
use crate::error::{Error, Result};
use crate::features::fnv1a_64;
use crate::preprocess::{preprocess_text, Stoplist, TokenizedReview};

pub use scoring::{
    bag_of_words, build_ranked_terms, inverse_document_frequency, term_frequency, tf_idf, RankedTerm, RankingScore,
};

pub const DEFAULT_TOP_K: usize = 250;

const BUNDLED_CATALOG: &str = include_str!("../../data/catalog.json");
const BUNDLED_PRIORITY_MAP: &str = include_str!("../../data/priority_map.csv");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    #[serde(default)]
    pub alias_terms: Vec<String>,
    #[serde(default)]
    pub impact_terms: Vec<String>,
}

/// Known smart-contract weaknesses with the words used to describe them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct VulnerabilityCatalog {
    entries: Vec<CatalogEntry>,
}

impl VulnerabilityCatalog {
    pub fn new(entries: Vec<CatalogEntry>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for entry in &entries {
            if !names.insert(entry.name.as_str()) {
                return Err(Error::DuplicateId(entry.name.clone()));
            }
            if let Some(term) = entry
                .alias_terms
                .iter()
                .chain(&entry.impact_terms)
                .find(|t| t.chars().any(char::is_uppercase))
            {
                return Err(Error::InvalidArgument(format!(
                    "catalog entry `{}`: term `{term}` is not lowercase",
                    entry.name
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn from_json(content: &[u8]) -> Result<Self> {
        let entries: Vec<CatalogEntry> = serde_json::from_slice(content)?;
        Self::new(entries)
    }

    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_CATALOG.as_bytes()).expect("bundled catalog is valid")
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    /// Every alias and impact term, in entry order.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .flat_map(|e| e.alias_terms.iter().chain(&e.impact_terms))
            .map(String::as_str)
    }

    /// Runs every term through the review pipeline so it matches review
    /// stems. Multi-word terms split into several single-stem terms.
    pub fn preprocessed(&self, stoplist: &Stoplist) -> Self {
        let run = |terms: &[String]| -> Vec<String> {
            let mut out: Vec<String> = Vec::new();
            for stem in terms.iter().flat_map(|t| preprocess_text(t, stoplist)) {
                if !out.contains(&stem) {
                    out.push(stem);
                }
            }
            out
        };
        Self {
            entries: self
                .entries
                .iter()
                .map(|e| CatalogEntry {
                    name: e.name.clone(),
                    alias_terms: run(&e.alias_terms),
                    impact_terms: run(&e.impact_terms),
                })
                .collect(),
        }
    }
}

/// Expert-provided `term -> priority` table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PriorityMapping {
    map: HashMap<String, PriorityLevel>,
}

#[derive(Deserialize)]
struct MappingRow {
    term: String,
    priority: String,
}

impl PriorityMapping {
    /// CSV with header `term,priority`.
    pub fn from_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let mut map = HashMap::new();
        for (index, row) in reader.deserialize::<MappingRow>().enumerate() {
            let row = row?;
            let priority = row.priority.parse().map_err(|_| Error::InvalidField {
                index,
                field: "priority",
                message: format!("unknown priority `{}`", row.priority),
            })?;
            if map.insert(row.term.to_lowercase(), priority).is_some() {
                return Err(Error::DuplicateId(row.term));
            }
        }
        Ok(Self { map })
    }

    /// Default mapping of well-known weakness stems shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_csv(BUNDLED_PRIORITY_MAP.as_bytes()).expect("bundled mapping is valid")
    }

    pub fn get(&self, term: &str) -> Option<PriorityLevel> {
        self.map.get(term).copied()
    }

    pub fn insert(&mut self, term: impl Into<String>, priority: PriorityLevel) {
        self.map.insert(term.into(), priority);
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl FromIterator<(String, PriorityLevel)> for PriorityMapping {
    fn from_iter<I: IntoIterator<Item = (String, PriorityLevel)>>(iter: I) -> Self {
        Self {
            map: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub term: String,
    pub priority: PriorityLevel,
    pub weight: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    max_size: usize,
    version: String,
    index: HashMap<String, usize>,
}

impl Lexicon {
    pub fn new(entries: Vec<LexiconEntry>, max_size: usize) -> Result<Self> {
        if entries.len() > max_size {
            return Err(Error::InvalidArgument(format!(
                "lexicon has {} entries, bound is {max_size}",
                entries.len()
            )));
        }
        let mut index = HashMap::with_capacity(entries.len());
        for (i, entry) in entries.iter().enumerate() {
            let well_formed =
                !entry.term.is_empty() && entry.term.chars().all(|c| c.is_alphanumeric() && !c.is_uppercase());
            if !well_formed {
                return Err(Error::InvalidArgument(format!(
                    "lexicon term `{}` is not a lowercase stem",
                    entry.term
                )));
            }
            if index.insert(entry.term.clone(), i).is_some() {
                return Err(Error::DuplicateId(entry.term.clone()));
            }
        }
        let mut lexicon = Self {
            entries,
            max_size,
            version: String::new(),
            index,
        };
        lexicon.version = format!("{:016x}", fnv1a_64(&lexicon.to_csv_bytes()?));
        Ok(lexicon)
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    /// Content fingerprint of the serialized lexicon.
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn get(&self, term: &str) -> Option<&LexiconEntry> {
        self.index.get(term).map(|&i| &self.entries[i])
    }

    /// CSV with header `term,priority,weight,rank`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        for entry in &self.entries {
            writer.serialize(entry)?;
        }
        if self.entries.is_empty() {
            writer.write_record(["term", "priority", "weight", "rank"])?;
        }
        writer.flush().map_err(|e| Error::io("<lexicon>", e))?;
        Ok(())
    }

    fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(buf)
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let entries = reader
            .deserialize()
            .collect::<std::result::Result<Vec<LexiconEntry>, _>>()?;
        let max_size = entries.len().max(DEFAULT_TOP_K);
        Self::new(entries, max_size)
    }
}

/// Attaches a priority to every ranked term. Fails listing all terms the
/// mapping does not cover.
pub fn assign_priorities(ranked: &[RankedTerm], mapping: &PriorityMapping, max_size: usize) -> Result<Lexicon> {
    let unmapped: Vec<String> = ranked
        .iter()
        .filter(|r| mapping.get(&r.term).is_none())
        .map(|r| r.term.clone())
        .collect();
    if !unmapped.is_empty() {
        return Err(Error::UnmappedTerms(unmapped));
    }
    let entries = ranked
        .iter()
        .map(|r| LexiconEntry {
            term: r.term.clone(),
            priority: mapping.get(&r.term).expect("checked above"),
            weight: r.tf_sum,
            rank: r.rank,
        })
        .collect();
    Lexicon::new(entries, max_size)
}

/// Highest priority among lexicon terms present in the review, or `None` if
/// no term matches.
pub fn auto_label(review: &TokenizedReview, lexicon: &Lexicon) -> Result<Option<PriorityLevel>> {
    if lexicon.is_empty() {
        return Err(Error::Empty("lexicon"));
    }
    Ok(review
        .tokens
        .iter()
        .filter_map(|t| lexicon.get(t).map(|e| e.priority))
        .max())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LabelSummary {
    pub labeled: usize,
    pub unmatched: usize,
    /// Reviews without a preprocessed counterpart (dropped by the length filter).
    pub skipped: usize,
}

/// Auto-labels every review that has preprocessed tokens. Existing labels are
/// replaced; reviews that match nothing end up unlabeled.
pub fn auto_label_corpus(
    corpus: &Corpus,
    tokenized: &[TokenizedReview],
    lexicon: &Lexicon,
) -> Result<(Corpus, LabelSummary)> {
    if lexicon.is_empty() {
        return Err(Error::Empty("lexicon"));
    }
    let by_id: HashMap<&str, &TokenizedReview> = tokenized.iter().map(|t| (t.review_id.as_str(), t)).collect();
    let mut summary = LabelSummary::default();
    let mut reviews = Vec::with_capacity(corpus.len());
    for review in corpus.reviews() {
        let mut review = review.clone();
        match by_id.get(review.id.as_str()) {
            Some(tokens) => {
                let label = auto_label(tokens, lexicon)?;
                if label.is_some() {
                    summary.labeled += 1;
                } else {
                    summary.unmatched += 1;
                }
                review.set_label(label, LabelOrigin::Auto);
            }
            None => {
                summary.skipped += 1;
                review.set_label(None, LabelOrigin::None);
            }
        }
        reviews.push(review);
    }
    Ok((Corpus::new(reviews)?, summary))
}
