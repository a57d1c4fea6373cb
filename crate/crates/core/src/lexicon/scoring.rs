use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::VulnerabilityCatalog;
use crate::error::{Error, Result};
use crate::preprocess::TokenizedReview;

/// Occurrences of `term` in the review.
pub fn term_frequency(term: &str, review: &TokenizedReview) -> usize {
    review.tokens.iter().filter(|t| *t == term).count()
}

/// Bag-of-words count `sum_i [t_i = term]`. Agrees with [`term_frequency`].
pub fn bag_of_words(term: &str, review: &TokenizedReview) -> usize {
    review.tokens.iter().map(|t| usize::from(t == term)).sum()
}

/// Smoothed inverse document frequency, `ln((|C| + 1) / (|C_t| + 1))`.
pub fn inverse_document_frequency(term: &str, corpus: &[TokenizedReview]) -> Result<f64> {
    if corpus.is_empty() {
        return Err(Error::Empty("corpus for idf"));
    }
    let containing = corpus.iter().filter(|r| r.tokens.iter().any(|t| t == term)).count();
    Ok(smoothed_idf(corpus.len(), containing))
}

fn smoothed_idf(corpus_len: usize, containing: usize) -> f64 {
    ((corpus_len as f64 + 1.0) / (containing as f64 + 1.0)).ln()
}

pub fn tf_idf(term: &str, review: &TokenizedReview, corpus: &[TokenizedReview]) -> Result<f64> {
    let idf = inverse_document_frequency(term, corpus)?;
    Ok(term_frequency(term, review) as f64 * idf)
}

/// Corpus-level score used to order candidate terms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankingScore {
    /// TF-IDF summed over every review.
    #[default]
    TfIdfSum,
    /// Raw occurrence count over every review.
    RawFrequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedTerm {
    pub term: String,
    /// Corpus-summed score (TF-IDF mass unless ranked by raw frequency).
    pub tf_sum: f64,
    pub doc_frequency: usize,
    pub rank: usize,
}

/// Scores the corpus vocabulary plus the catalog terms and keeps the `top_k`
/// best, ranked 1..=K by descending score with ties broken by term.
///
/// `catalog` must already be run through the review preprocessing pipeline
/// (see [`VulnerabilityCatalog::preprocessed`]).
pub fn build_ranked_terms(
    catalog: &VulnerabilityCatalog,
    corpus: &[TokenizedReview],
    top_k: usize,
    score: RankingScore,
) -> Result<Vec<RankedTerm>> {
    if top_k == 0 {
        return Err(Error::InvalidArgument("top_k must be positive".into()));
    }
    if corpus.is_empty() {
        return Err(Error::Empty("corpus for lexicon construction"));
    }

    let mut counts: HashMap<&str, (usize, usize)> = HashMap::new();
    for review in corpus {
        let mut seen_here = BTreeSet::new();
        for token in &review.tokens {
            let entry = counts.entry(token.as_str()).or_default();
            entry.0 += 1;
            if seen_here.insert(token.as_str()) {
                entry.1 += 1;
            }
        }
    }

    let mut candidates: BTreeSet<&str> = counts.keys().copied().collect();
    candidates.extend(catalog.terms());

    let mut scored: Vec<RankedTerm> = candidates
        .into_iter()
        .map(|term| {
            let (occurrences, doc_frequency) = counts.get(term).copied().unwrap_or_default();
            // Sum over reviews of tf * idf; idf does not depend on the review.
            let tf_sum = match score {
                RankingScore::TfIdfSum => occurrences as f64 * smoothed_idf(corpus.len(), doc_frequency),
                RankingScore::RawFrequency => occurrences as f64,
            };
            RankedTerm {
                term: term.to_string(),
                tf_sum,
                doc_frequency,
                rank: 0,
            }
        })
        .collect();

    scored.sort_by(|a, b| b.tf_sum.total_cmp(&a.tf_sum).then_with(|| a.term.cmp(&b.term)));
    scored.truncate(top_k);
    for (i, term) in scored.iter_mut().enumerate() {
        term.rank = i + 1;
    }
    Ok(scored)
}
