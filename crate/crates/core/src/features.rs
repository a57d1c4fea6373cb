//! Hashing-trick vectorizer.
//!
//! Token `t` goes to bucket `H(t) mod dim`, where `H` is 64-bit FNV-1a over
//! the token's UTF-8 bytes (offset basis `0xcbf29ce484222325`, prime
//! `0x100000001b3`). The hash is part of the file format: changing it
//! invalidates every trained checkpoint.

use std::hash::Hasher;

use fnv::FnvHasher;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_DIM: usize = 10_000;

/// 64-bit FNV-1a of raw bytes. `FnvHasher::write` hashes exactly the given
/// bytes, unlike `Hash for str`, which appends a terminator.
pub fn fnv1a_64(bytes: &[u8]) -> u64 {
    let mut hasher = FnvHasher::default();
    hasher.write(bytes);
    hasher.finish()
}

pub fn hash_token(token: &str, dim: usize) -> Result<usize> {
    if dim == 0 {
        return Err(Error::InvalidArgument("feature dimension must be positive".into()));
    }
    Ok((fnv1a_64(token.as_bytes()) % dim as u64) as usize)
}

/// Dense hashed term counts.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn zeros(dim: usize) -> Self {
        Self { values: vec![0.0; dim] }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(index, value)` for every non-zero entry, in index order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().copied().enumerate().filter(|&(_, v)| v != 0.0)
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    /// Unit-L2 copy. Not applied by default: the classifier consumes raw counts.
    pub fn l2_normalized(&self) -> Self {
        let norm = self.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return self.clone();
        }
        Self {
            values: self.values.iter().map(|v| v / norm).collect(),
        }
    }
}

pub fn vectorize(tokens: &[impl AsRef<str>], dim: usize) -> Result<FeatureVector> {
    if dim == 0 {
        return Err(Error::InvalidArgument("feature dimension must be positive".into()));
    }
    let mut vector = FeatureVector::zeros(dim);
    for token in tokens {
        vector.values[hash_token(token.as_ref(), dim)?] += 1.0;
    }
    Ok(vector)
}

/// Maps a token sequence to a fixed-size vector. The hashing vectorizer is
/// the only provider shipped; the classifier is written against this trait.
pub trait FeatureProvider {
    fn dim(&self) -> usize;
    fn features(&self, tokens: &[String]) -> Result<FeatureVector>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashingVectorizer {
    dim: usize,
}

impl HashingVectorizer {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("feature dimension must be positive".into()));
        }
        Ok(Self { dim })
    }
}

impl Default for HashingVectorizer {
    fn default() -> Self {
        Self { dim: DEFAULT_DIM }
    }
}

impl FeatureProvider for HashingVectorizer {
    fn dim(&self) -> usize {
        self.dim
    }

    fn features(&self, tokens: &[String]) -> Result<FeatureVector> {
        vectorize(tokens, self.dim)
    }
}

/// One pinned hash value, as stored in golden-vector files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenHash {
    pub token: String,
    pub dim: usize,
    pub index: usize,
}
