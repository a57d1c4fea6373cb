//! Text cleaning, tokenization, stopword removal and stemming.

mod stem;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::corpus::CodeReview;

pub use stem::stem;

/// Reviews with fewer cleaned words than this are dropped as noise.
pub const MIN_WORDS: usize = 5;

const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedReview {
    pub review_id: String,
    pub tokens: Vec<String>,
    /// Cleaned word count before stopword removal.
    pub original_token_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Stoplist {
    /// Parses one token per line; `#` starts a comment.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(|line| line.split('#').next().unwrap_or("").trim())
            .filter(|w| !w.is_empty())
            .map(str::to_lowercase)
            .collect();
        Self { words }
    }

    /// The English list shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_STOPWORDS)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stoplist {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self {
            words: iter.into_iter().map(|s| s.into().to_lowercase()).collect(),
        }
    }
}

fn is_fence(line: &str) -> bool {
    line.trim_start().starts_with("```")
}

fn is_indented_code(line: &str) -> bool {
    !line.trim().is_empty() && (line.starts_with("    ") || line.starts_with('\t'))
}

/// `keyword` as a whole word followed (after optional spaces and, when
/// `with_ident`, an identifier) by `(`.
fn has_call_form(line: &str, keyword: &str, with_ident: bool) -> bool {
    let is_ident = |c: char| c.is_ascii_alphanumeric() || c == '_';
    let mut search = 0;
    while let Some(found) = line[search..].find(keyword) {
        let start = search + found;
        let end = start + keyword.len();
        search = end;
        if line[..start].chars().next_back().is_some_and(is_ident) {
            continue;
        }
        let rest = &line[end..];
        if rest.chars().next().is_some_and(is_ident) {
            continue;
        }
        let mut rest = rest.trim_start();
        if with_ident {
            let ident_len = rest.find(|c: char| !is_ident(c)).unwrap_or(rest.len());
            if ident_len == 0 {
                continue;
            }
            rest = rest[ident_len..].trim_start();
        }
        if rest.starts_with('(') {
            return true;
        }
    }
    false
}

fn is_solidity_line(line: &str) -> bool {
    let trimmed = line.trim();
    line.contains("msg.sender")
        || (trimmed.starts_with("pragma ") && trimmed.contains(';'))
        || has_call_form(line, "function", true)
        || has_call_form(line, "mapping", false)
}

/// Length of the hex-digit run after a `0x` prefix starting at byte `i`, if
/// the prefix begins a word.
fn hex_run_at(line: &str, i: usize) -> Option<usize> {
    let bytes = line.as_bytes();
    if bytes.get(i) != Some(&b'0') || !matches!(bytes.get(i + 1), Some(b'x' | b'X')) {
        return None;
    }
    if line[..i].chars().next_back().is_some_and(char::is_alphanumeric) {
        return None;
    }
    Some(bytes[i + 2..].iter().take_while(|b| b.is_ascii_hexdigit()).count())
}

/// Lines carrying a full transaction hash are log dumps, not prose.
fn is_transaction_log_line(line: &str) -> bool {
    (0..line.len()).any(|i| hex_run_at(line, i).is_some_and(|n| n >= 64))
}

/// Removes `0x` hex runs of at least 8 characters including the prefix.
fn strip_hex_runs(line: &str) -> String {
    let mut out = String::with_capacity(line.len());
    let mut i = 0;
    while i < line.len() {
        if let Some(n) = hex_run_at(line, i).filter(|&n| n + 2 >= 8) {
            out.push(' ');
            i += n + 2;
            continue;
        }
        let c = line[i..].chars().next().expect("char boundary");
        out.push(c);
        i += c.len_utf8();
    }
    out
}

/// Removes everything from a URL start up to the next whitespace.
fn strip_urls(line: &str) -> String {
    let mut out = line.to_string();
    loop {
        let lower = out.to_ascii_lowercase();
        let Some(start) = ["http://", "https://", "www."]
            .iter()
            .filter_map(|p| lower.find(p))
            .min()
        else {
            return out;
        };
        let end = out[start..].find(char::is_whitespace).map_or(out.len(), |e| start + e);
        out.replace_range(start..end, " ");
    }
}

/// Normalizes raw review text: drops code blocks, code-like and log lines,
/// URLs and hex addresses, lowercases, replaces every non-alphanumeric
/// character with a space and collapses whitespace.
pub fn clean_text(raw: &str) -> String {
    let mut kept = String::with_capacity(raw.len());
    let mut in_fence = false;
    for line in raw.lines() {
        if is_fence(line) {
            let body = line.trim();
            let one_liner = body.len() > 6 && body.ends_with("```");
            if !one_liner {
                in_fence = !in_fence;
            }
            continue;
        }
        if in_fence || is_indented_code(line) || is_solidity_line(line) || is_transaction_log_line(line) {
            continue;
        }
        kept.push_str(&strip_hex_runs(&strip_urls(line)));
        kept.push(' ');
    }

    let mut out = String::with_capacity(kept.len());
    let mut pending_space = false;
    for c in kept.to_lowercase().chars() {
        if c.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else {
            pending_space = true;
        }
    }
    out
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

pub fn remove_stopwords(tokens: &[String], stoplist: &Stoplist) -> Vec<String> {
    tokens.iter().filter(|t| !stoplist.contains(t)).cloned().collect()
}

/// Full pipeline without the length filter; used for catalog terms.
pub fn preprocess_text(text: &str, stoplist: &Stoplist) -> Vec<String> {
    let tokens = tokenize(&clean_text(text));
    remove_stopwords(&tokens, stoplist).iter().map(|t| stem(t)).collect()
}

/// Cleans, tokenizes, removes stopwords and stems `summary + " " + description`.
///
/// Returns `None` when the cleaned text has fewer than [`MIN_WORDS`] words,
/// or when nothing is left after stopword removal.
pub fn preprocess_review(review: &CodeReview, stoplist: &Stoplist) -> Option<TokenizedReview> {
    let tokens = tokenize(&clean_text(&review.text()));
    if tokens.len() < MIN_WORDS {
        return None;
    }
    let original_token_count = tokens.len();
    let stems: Vec<String> = remove_stopwords(&tokens, stoplist).iter().map(|t| stem(t)).collect();
    if stems.is_empty() {
        return None;
    }
    Some(TokenizedReview {
        review_id: review.id.clone(),
        tokens: stems,
        original_token_count,
    })
}
