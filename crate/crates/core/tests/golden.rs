use triage_core::features::{hash_token, vectorize, GoldenHash};
use triage_core::preprocess::stem;

#[test]
fn porter_matches_reference_stems() {
    let golden = include_str!("fixtures/porter_golden.tsv");
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for line in golden.lines().filter(|l| !l.starts_with('#') && !l.is_empty()) {
        let (word, expected) = line.split_once('\t').expect("word<TAB>stem");
        let got = stem(word);
        if got != expected {
            mismatches.push(format!("{word}: got {got}, want {expected}"));
        }
        checked += 1;
    }
    assert!(checked > 2000, "only {checked} golden pairs");
    assert!(
        mismatches.is_empty(),
        "{} mismatches:\n{}",
        mismatches.len(),
        mismatches.join("\n")
    );
}

#[test]
fn hash_indices_match_independent_fnv() {
    let golden: Vec<GoldenHash> = serde_json::from_str(include_str!("fixtures/hash_golden.json")).unwrap();
    assert_eq!(golden.len(), 100);
    for g in &golden {
        assert_eq!(hash_token(&g.token, g.dim).unwrap(), g.index, "{g:?}");
    }
}

#[test]
fn vectorize_places_counts_at_golden_indices() {
    let golden: Vec<GoldenHash> = serde_json::from_str(include_str!("fixtures/hash_golden.json")).unwrap();
    let at_10k: Vec<&GoldenHash> = golden.iter().filter(|g| g.dim == 10_000).collect();
    let tokens: Vec<&str> = at_10k.iter().map(|g| g.token.as_str()).collect();
    let v = vectorize(&tokens, 10_000).unwrap();
    for g in at_10k {
        assert!(v.values()[g.index] >= 1.0, "{g:?}");
    }
    assert_eq!(v.l1_norm(), tokens.len() as f64);
}
