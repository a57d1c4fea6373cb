use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Corpus, PriorityLevel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SplitMode {
    /// Uniform shuffle of the whole corpus.
    #[default]
    Shuffled,
    /// Shuffle within each label group (unlabeled reviews form their own
    /// group) and allocate train slots proportionally.
    StratifiedByLabel,
}

/// `floor(fraction * n)`, tolerant of representation error such as
/// `0.29 * 100 = 28.999...`.
fn train_size(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64) + 1e-9).floor() as usize
}

/// Partitions `corpus` into train and test sets. Both keep the corpus order.
pub fn split_corpus(corpus: &Corpus, train_fraction: f64, seed: u64, mode: SplitMode) -> Result<(Corpus, Corpus)> {
    if corpus.is_empty() {
        return Err(Error::Empty("corpus to split"));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let n = corpus.len();
    let n_train = train_size(train_fraction, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut in_train = vec![false; n];
    match mode {
        SplitMode::Shuffled => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            for &i in &order[..n_train] {
                in_train[i] = true;
            }
        }
        SplitMode::StratifiedByLabel => {
            let mut groups: BTreeMap<Option<PriorityLevel>, Vec<usize>> = BTreeMap::new();
            for (i, review) in corpus.reviews().iter().enumerate() {
                groups.entry(review.label).or_default().push(i);
            }
            // Largest-remainder allocation so the quotas add up to n_train.
            let exact: Vec<f64> = groups
                .values()
                .map(|g| g.len() as f64 * n_train as f64 / n as f64)
                .collect();
            let mut quotas: Vec<usize> = exact.iter().map(|q| q.floor() as usize).collect();
            let mut by_remainder: Vec<usize> = (0..quotas.len()).collect();
            by_remainder.sort_by(|&a, &b| {
                let ra = exact[a] - exact[a].floor();
                let rb = exact[b] - exact[b].floor();
                rb.total_cmp(&ra).then(a.cmp(&b))
            });
            let mut missing = n_train - quotas.iter().sum::<usize>();
            for g in by_remainder {
                if missing == 0 {
                    break;
                }
                quotas[g] += 1;
                missing -= 1;
            }
            for (members, quota) in groups.values_mut().zip(quotas) {
                members.shuffle(&mut rng);
                for &i in &members[..quota] {
                    in_train[i] = true;
                }
            }
        }
    }

    let (mut train, mut test) = (Vec::with_capacity(n_train), Vec::with_capacity(n - n_train));
    for (review, to_train) in corpus.reviews().iter().zip(in_train) {
        if to_train { &mut train } else { &mut test }.push(review.clone());
    }
    Ok((Corpus { reviews: train }, Corpus { reviews: test }))
}
