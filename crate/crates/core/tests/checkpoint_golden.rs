//! `fixtures/golden_model.ckpt` is `init_model(32, 2024)` with a short run of
//! training; the pinned probabilities were computed by an independent numpy
//! forward pass over the raw file.

use serde::Deserialize;
use triage_core::classifier::synthetic::planted_keyword_samples;
use triage_core::classifier::{
    init_model, load_checkpoint, predict, save_checkpoint, train, Example, MlpModel, TrainConfig,
};
use triage_core::features::vectorize;
use triage_core::preprocess::TokenizedReview;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/golden_model.ckpt");
const PREDICTIONS: &str = include_str!("fixtures/golden_predictions.json");

#[derive(Deserialize)]
struct Pinned {
    tokens: Vec<String>,
    label: String,
    probabilities: [f64; 4],
}

fn golden_model() -> MlpModel {
    let samples = planted_keyword_samples(64, 3);
    let data: Vec<Example> = samples
        .iter()
        .map(|(t, l)| Example::new(vectorize(t, 32).unwrap(), *l))
        .collect();
    let config = TrainConfig {
        epochs: 3,
        batch_size: 16,
        seed: 2024,
        ..TrainConfig::default()
    };
    train(init_model(32, 2024).unwrap(), &data, &data, &config)
        .unwrap()
        .0
        .model
}

#[test]
#[ignore = "rewrites the golden checkpoint"]
fn regenerate_golden_checkpoint() {
    save_checkpoint(&golden_model(), FIXTURE).unwrap();
}

#[test]
fn training_still_produces_the_golden_checkpoint() {
    let fresh = golden_model();
    let mut raw = Vec::new();
    triage_core::classifier::write_checkpoint(&fresh, &mut raw).unwrap();
    assert!(
        std::fs::read(FIXTURE).unwrap() == raw,
        "serialized model drifted from fixture"
    );
}

#[test]
fn golden_checkpoint_predictions_are_pinned() {
    let model = load_checkpoint(FIXTURE).unwrap();
    let pinned: Vec<Pinned> = serde_json::from_str(PREDICTIONS).unwrap();
    assert!(pinned.len() >= 5);
    for p in pinned {
        let review = TokenizedReview {
            review_id: "g".into(),
            original_token_count: p.tokens.len(),
            tokens: p.tokens.clone(),
        };
        let (level, probs) = predict(&model, &review).unwrap();
        assert_eq!(level.as_str(), p.label, "{:?}", p.tokens);
        for (a, b) in probs.iter().zip(&p.probabilities) {
            assert!(
                (a - b).abs() <= 1e-12,
                "{:?}: {probs:?} vs {:?}",
                p.tokens,
                p.probabilities
            );
        }
    }
}
