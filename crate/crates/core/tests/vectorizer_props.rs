//! Property tests for the vector-space encodings.

use finsent::lexicon::{FeatureClass, FeatureSequence};
use finsent::vectorizer::{SpaceKind, VectorSpace};
use proptest::prelude::*;

fn class_strategy() -> impl Strategy<Value = FeatureClass> {
    prop::sample::select(FeatureClass::ALL.to_vec())
}

fn sequence(max_len: usize) -> impl Strategy<Value = FeatureSequence> {
    prop::collection::vec(class_strategy(), 1..=max_len).prop_map(|literals| FeatureSequence {
        surface: literals.iter().map(|c| c.to_string()).collect(),
        literals,
        label: None,
    })
}

proptest! {
    #[test]
    fn ubt_count_sums_follow_the_length_identities(corpus in prop::collection::vec(sequence(15), 1..8)) {
        let space = VectorSpace::fit(SpaceKind::Ubt, &corpus).unwrap();
        for seq in &corpus {
            // every n-gram of a fit sequence is in the vocabulary, so the
            // transform sums are exactly the combinatorial counts
            let v = space.transform(seq);
            let n = seq.len() as f64;
            let expected = n + (n - 1.0).max(0.0) + (n - 2.0).max(0.0);
            prop_assert!((v.value_sum() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn lps_bits_are_binary_and_bounded(
        corpus in prop::collection::vec(sequence(12), 1..8),
        probe in sequence(20),
    ) {
        let space = VectorSpace::fit(SpaceKind::Lps, &corpus).unwrap();
        let v = space.transform(&probe);
        prop_assert!(v.entries().iter().all(|&(_, val)| val == 1.0));
        prop_assert!(v.nnz() <= probe.len().min(space.max_len()));
        prop_assert!(v.entries().windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn transform_is_pure(corpus in prop::collection::vec(sequence(10), 1..6)) {
        let space = VectorSpace::fit(SpaceKind::Ubt, &corpus).unwrap();
        for seq in &corpus {
            prop_assert_eq!(space.transform(seq), space.transform(seq));
        }
    }
}
