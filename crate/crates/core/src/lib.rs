//! Triage toolkit for smart-contract code reviews.
//!
//! The pipeline runs in stages that each read and write plain files:
//!
//! 1. [`corpus`] ingests CVE exports and GitHub issue exports into a review corpus.
//! 2. [`preprocess`] cleans, tokenizes, filters stopwords and Porter-stems review text.
//! 3. [`lexicon`] ranks weakness keywords by summed TF-IDF, attaches priorities and
//!    auto-labels reviews with the highest matching priority.
//! 4. [`features`] hashes token sequences into fixed-size count vectors.
//! 5. [`classifier`] trains a dropout + dense(128) + dense(64) + softmax(4) network
//!    with Adam and keeps the best checkpoint by validation accuracy.
//! 6. [`eval`] computes confusion matrices, per-class/macro metrics and Cohen's kappa.
//! 7. [`zeroday`] classifies CVE exploitation timelines and aggregates statistics.

pub mod classifier;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod lexicon;
pub mod preprocess;
pub mod zeroday;

use std::fmt;

pub use corpus::{CodeReview, Corpus, CveRecord, LabelOrigin, PriorityLevel, ReviewSource};
pub use error::{Error, Result};

/// A non-fatal ingestion problem tied to an input record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub index: usize,
    pub message: String,
}

impl Warning {
    pub fn new(index: usize, message: impl Into<String>) -> Self {
        Self {
            index,
            message: message.into(),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "record {}: {}", self.index, self.message)
    }
}
