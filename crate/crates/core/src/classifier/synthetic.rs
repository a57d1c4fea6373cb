//! Planted-keyword toy data for smoke-testing the training loop.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::PriorityLevel;

pub const NOISE_VOCABULARY: usize = 500;
pub const NOISE_TOKENS: usize = 15;

/// The keyword planted in every sample of `level`.
pub fn keyword(level: PriorityLevel) -> String {
    format!("planted{}", level.as_str())
}

/// `n` token lists with balanced labels. Each has [`NOISE_TOKENS`] tokens
/// drawn from a shared noise vocabulary plus two copies of its class keyword
/// at random positions.
pub fn planted_keyword_samples(n: usize, seed: u64) -> Vec<(Vec<String>, PriorityLevel)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples: Vec<_> = (0..n)
        .map(|i| {
            let level = PriorityLevel::ALL[i % PriorityLevel::ALL.len()];
            let mut tokens: Vec<String> = (0..NOISE_TOKENS)
                .map(|_| format!("noise{}", rng.gen_range(0..NOISE_VOCABULARY)))
                .collect();
            for _ in 0..2 {
                let at = rng.gen_range(0..=tokens.len());
                tokens.insert(at, keyword(level));
            }
            (tokens, level)
        })
        .collect();
    samples.shuffle(&mut rng);
    samples
}
