//! Fixed-dimension vector spaces over feature-literal sequences.
//!
//! Two encodings are supported:
//!
//! * **LPS** — a positional binary coding: bit `(i, class)` is set when the
//!   literal at position `i` is `class`. The maximum encodable length is the
//!   longest sequence seen at fit time; longer sequences are truncated and
//!   the truncation counter is incremented.
//! * **UBT** — the unigram + bigram + trigram ensemble: raw term-frequency
//!   counts of every 1-, 2-, and 3-gram of literals observed at fit time.
//!
//! Vocabularies freeze at fit time; out-of-vocabulary keys at transform time
//! are dropped, keeping dimensions stable across repeated train/test splits.
//! `Plain` literals participate in n-grams like any other class.

use crate::lexicon::{FeatureClass, FeatureSequence};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

/// Which encoding a [`VectorSpace`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Lps,
    Ubt,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceKind::Lps => "lps",
            SpaceKind::Ubt => "ubt",
        })
    }
}

impl FromStr for SpaceKind {
    type Err = VectorizerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lps" => Ok(SpaceKind::Lps),
            "ubt" => Ok(SpaceKind::Ubt),
            other => Err(VectorizerError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VectorizerError {
    #[error("unknown representation kind `{0}` (expected lps or ubt)")]
    UnknownKind(String),
    #[error("cannot fit a vector space on an empty corpus")]
    EmptyCorpus,
    #[error("vector space sidecar parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("vector space sidecar: bad key `{0}`")]
    BadKey(String),
    #[error("vector space sidecar: unsupported version {0}")]
    Version(u32),
}

/// One vocabulary coordinate: an n-gram of literals (UBT) or a
/// (position, class) pair (LPS).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FeatureKey {
    Unigram(FeatureClass),
    Bigram(FeatureClass, FeatureClass),
    Trigram(FeatureClass, FeatureClass, FeatureClass),
    Positional(usize, FeatureClass),
}

impl fmt::Display for FeatureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureKey::Unigram(a) => write!(f, "{a}"),
            FeatureKey::Bigram(a, b) => write!(f, "{a}|{b}"),
            FeatureKey::Trigram(a, b, c) => write!(f, "{a}|{b}|{c}"),
            FeatureKey::Positional(pos, class) => write!(f, "{pos}:{class}"),
        }
    }
}

impl FromStr for FeatureKey {
    type Err = VectorizerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || VectorizerError::BadKey(s.to_string());
        if let Some((pos, class)) = s.split_once(':') {
            let pos: usize = pos.parse().map_err(|_| bad())?;
            let class = class.parse::<FeatureClass>().map_err(|_| bad())?;
            return Ok(FeatureKey::Positional(pos, class));
        }
        let parts: Vec<FeatureClass> = s
            .split('|')
            .map(|p| p.parse::<FeatureClass>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        match parts.as_slice() {
            [a] => Ok(FeatureKey::Unigram(*a)),
            [a, b] => Ok(FeatureKey::Bigram(*a, *b)),
            [a, b, c] => Ok(FeatureKey::Trigram(*a, *b, *c)),
            _ => Err(bad()),
        }
    }
}

/// Sparse vector with strictly increasing indices and positive values.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn from_entries(mut entries: Vec<(usize, f64)>) -> Self {
        entries.retain(|&(_, v)| v > 0.0);
        entries.sort_by_key(|&(i, _)| i);
        SparseVector { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of all stored values.
    pub fn value_sum(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v).sum()
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(i, v)| v * dense.get(i).copied().unwrap_or(0.0))
            .sum()
    }
}

/// A fitted, immutable vocabulary mapping keys to dense column indices.
#[derive(Debug)]
pub struct VectorSpace {
    kind: SpaceKind,
    keys: Vec<FeatureKey>,
    index: HashMap<FeatureKey, usize>,
    /// Longest fit-time sequence; meaningful for LPS only.
    max_len: usize,
    truncations: AtomicU64,
}

impl Clone for VectorSpace {
    fn clone(&self) -> Self {
        VectorSpace {
            kind: self.kind,
            keys: self.keys.clone(),
            index: self.index.clone(),
            max_len: self.max_len,
            truncations: AtomicU64::new(self.truncations.load(Ordering::Relaxed)),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SpaceSidecar {
    version: u32,
    kind: SpaceKind,
    max_len: usize,
    vocabulary: Vec<String>,
}

const SIDECAR_VERSION: u32 = 1;

impl VectorSpace {
    /// Fit a vocabulary on a corpus of feature sequences.
    ///
    /// UBT collects every observed 1/2/3-gram; LPS collects every observed
    /// (position, class) pair and fixes `max_len` to the longest sequence.
    /// Key indices follow first-observation order over the corpus.
    pub fn fit(kind: SpaceKind, corpus: &[FeatureSequence]) -> Result<Self, VectorizerError> {
        if corpus.is_empty() {
            return Err(VectorizerError::EmptyCorpus);
        }
        let mut keys: Vec<FeatureKey> = Vec::new();
        let mut index: HashMap<FeatureKey, usize> = HashMap::new();
        let insert = |key: FeatureKey, keys: &mut Vec<FeatureKey>, index: &mut HashMap<FeatureKey, usize>| {
            if !index.contains_key(&key) {
                index.insert(key, keys.len());
                keys.push(key);
            }
        };
        let mut max_len = 0usize;
        for seq in corpus {
            max_len = max_len.max(seq.len());
            match kind {
                SpaceKind::Ubt => {
                    for key in ngram_keys(&seq.literals) {
                        insert(key, &mut keys, &mut index);
                    }
                }
                SpaceKind::Lps => {
                    for (pos, &class) in seq.literals.iter().enumerate() {
                        insert(FeatureKey::Positional(pos, class), &mut keys, &mut index);
                    }
                }
            }
        }
        Ok(VectorSpace {
            kind,
            keys,
            index,
            max_len,
            truncations: AtomicU64::new(0),
        })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.keys.len()
    }

    /// Maximum encodable sequence length (LPS only).
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn keys(&self) -> &[FeatureKey] {
        &self.keys
    }

    pub fn index_of(&self, key: &FeatureKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Number of sequence positions truncated by LPS transforms so far.
    pub fn truncation_count(&self) -> u64 {
        self.truncations.load(Ordering::Relaxed)
    }

    /// Encode one sequence. Out-of-vocabulary keys are dropped; LPS
    /// positions at or beyond `max_len` are truncated and counted.
    pub fn transform(&self, seq: &FeatureSequence) -> SparseVector {
        match self.kind {
            SpaceKind::Ubt => {
                let mut counts: HashMap<usize, f64> = HashMap::new();
                for key in ngram_keys(&seq.literals) {
                    if let Some(&col) = self.index.get(&key) {
                        *counts.entry(col).or_insert(0.0) += 1.0;
                    }
                }
                SparseVector::from_entries(counts.into_iter().collect())
            }
            SpaceKind::Lps => {
                let mut entries = Vec::new();
                for (pos, &class) in seq.literals.iter().enumerate() {
                    if pos >= self.max_len {
                        self.truncations
                            .fetch_add((seq.len() - self.max_len) as u64, Ordering::Relaxed);
                        break;
                    }
                    if let Some(&col) = self.index.get(&FeatureKey::Positional(pos, class)) {
                        entries.push((col, 1.0));
                    }
                }
                SparseVector::from_entries(entries)
            }
        }
    }

    /// Serialize to the versioned JSON sidecar (keys in index order).
    pub fn to_sidecar_json(&self) -> serde_json::Value {
        serde_json::to_value(SpaceSidecar {
            version: SIDECAR_VERSION,
            kind: self.kind,
            max_len: self.max_len,
            vocabulary: self.keys.iter().map(|k| k.to_string()).collect(),
        })
        .expect("sidecar serializes")
    }

    pub fn from_sidecar_json(value: &serde_json::Value) -> Result<Self, VectorizerError> {
        let sidecar: SpaceSidecar = serde_json::from_value(value.clone())?;
        if sidecar.version != SIDECAR_VERSION {
            return Err(VectorizerError::Version(sidecar.version));
        }
        let keys: Vec<FeatureKey> = sidecar
            .vocabulary
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_, _>>()?;
        let index = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        Ok(VectorSpace {
            kind: sidecar.kind,
            keys,
            index,
            max_len: sidecar.max_len,
            truncations: AtomicU64::new(0),
        })
    }
}

fn ngram_keys(literals: &[FeatureClass]) -> impl Iterator<Item = FeatureKey> + '_ {
    let unis = literals.iter().map(|&a| FeatureKey::Unigram(a));
    let bis = literals.windows(2).map(|w| FeatureKey::Bigram(w[0], w[1]));
    let tris = literals.windows(3).map(|w| FeatureKey::Trigram(w[0], w[1], w[2]));
    unis.chain(bis).chain(tris)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::FeatureClass as F;
    use std::collections::HashSet;

    fn seq(literals: &[F]) -> FeatureSequence {
        FeatureSequence {
            literals: literals.to_vec(),
            surface: literals.iter().map(|c| c.to_string().to_lowercase()).collect(),
            label: None,
        }
    }

    #[test]
    fn ubt_fit_enumerates_observed_ngrams() {
        let corpus = vec![seq(&[F::Target, F::Up])];
        let space = VectorSpace::fit(SpaceKind::Ubt, &corpus).unwrap();
        assert_eq!(space.dimension(), 3);
        assert_eq!(
            space.keys(),
            [
                FeatureKey::Unigram(F::Target),
                FeatureKey::Unigram(F::Up),
                FeatureKey::Bigram(F::Target, F::Up),
            ]
        );
    }

    #[test]
    fn lps_fit_enumerates_observed_position_class_pairs() {
        let corpus = vec![seq(&[F::Target, F::Up])];
        let space = VectorSpace::fit(SpaceKind::Lps, &corpus).unwrap();
        assert_eq!(space.dimension(), 2);
        assert_eq!(space.max_len(), 2);
        assert_eq!(
            space.keys(),
            [FeatureKey::Positional(0, F::Target), FeatureKey::Positional(1, F::Up)]
        );
    }

    #[test]
    fn ubt_dimension_matches_brute_force_ngram_set() {
        let corpus = vec![
            seq(&[F::Target, F::Up, F::Number]),
            seq(&[F::Other, F::Up, F::Number, F::Plain]),
            seq(&[F::Target, F::Up]),
        ];
        // independent oracle: build the set of n-gram strings directly
        let mut oracle: HashSet<String> = HashSet::new();
        for s in &corpus {
            let lits = &s.literals;
            for n in 1..=3usize {
                for w in lits.windows(n) {
                    let key: Vec<String> = w.iter().map(|c| c.to_string()).collect();
                    oracle.insert(key.join("|"));
                }
            }
        }
        let space = VectorSpace::fit(SpaceKind::Ubt, &corpus).unwrap();
        assert_eq!(space.dimension(), oracle.len());
        let keys: HashSet<String> = space.keys().iter().map(|k| k.to_string()).collect();
        assert_eq!(keys, oracle);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            VectorSpace::fit(SpaceKind::Ubt, &[]),
            Err(VectorizerError::EmptyCorpus)
        ));
    }

    #[test]
    fn ubt_transform_counts_term_frequencies() {
        let corpus = vec![seq(&[F::Up, F::Up])];
        let space = VectorSpace::fit(SpaceKind::Ubt, &corpus).unwrap();
        let v = space.transform(&seq(&[F::Up, F::Up]));
        let uni = space.index_of(&FeatureKey::Unigram(F::Up)).unwrap();
        let bi = space.index_of(&FeatureKey::Bigram(F::Up, F::Up)).unwrap();
        let entries: std::collections::HashMap<usize, f64> = v.entries().iter().copied().collect();
        assert_eq!(entries[&uni], 2.0);
        assert_eq!(entries[&bi], 1.0);
    }

    #[test]
    fn fully_unseen_sequence_maps_to_empty_vector() {
        let corpus = vec![seq(&[F::Up, F::Up])];
        let space = VectorSpace::fit(SpaceKind::Ubt, &corpus).unwrap();
        let v = space.transform(&seq(&[F::Down, F::Negator]));
        assert!(v.is_empty());
    }

    #[test]
    fn ngram_count_sums_follow_the_length_identity() {
        // counted by an explicit loop, before any unseen-drop
        let s = seq(&[F::Target, F::Up, F::Number, F::Plain, F::Down]);
        let keys: Vec<FeatureKey> = ngram_keys(&s.literals).collect();
        let unigrams = keys.iter().filter(|k| matches!(k, FeatureKey::Unigram(_))).count();
        let bigrams = keys.iter().filter(|k| matches!(k, FeatureKey::Bigram(..))).count();
        let trigrams = keys.iter().filter(|k| matches!(k, FeatureKey::Trigram(..))).count();
        assert_eq!(unigrams, 5);
        assert_eq!(bigrams, 4);
        assert_eq!(trigrams, 3);
    }

    #[test]
    fn transform_never_drops_ngrams_of_a_fit_sequence() {
        let corpus = vec![
            seq(&[F::Target, F::Up, F::Number, F::Plain]),
            seq(&[F::Other, F::Down]),
        ];
        let space = VectorSpace::fit(SpaceKind::Ubt, &corpus).unwrap();
        for s in &corpus {
            let v = space.transform(s);
            let n = s.len() as f64;
            let expected = n + (n - 1.0).max(0.0) + (n - 2.0).max(0.0);
            assert_eq!(v.value_sum(), expected);
        }
    }

    #[test]
    fn lps_vectors_are_binary_with_bounded_popcount() {
        let corpus = vec![seq(&[F::Target, F::Up, F::Number]), seq(&[F::Other, F::Up])];
        let space = VectorSpace::fit(SpaceKind::Lps, &corpus).unwrap();
        for s in &corpus {
            let v = space.transform(s);
            assert!(v.entries().iter().all(|&(_, val)| val == 1.0));
            assert!(v.nnz() <= s.len().min(space.max_len()));
        }
    }

    #[test]
    fn lps_truncates_long_sequences_and_counts() {
        let corpus = vec![seq(&[F::Target, F::Up])];
        let space = VectorSpace::fit(SpaceKind::Lps, &corpus).unwrap();
        assert_eq!(space.truncation_count(), 0);
        let v = space.transform(&seq(&[F::Target, F::Up, F::Number, F::Plain]));
        assert_eq!(v.nnz(), 2);
        assert_eq!(space.truncation_count(), 2);
    }

    #[test]
    fn shuffled_corpus_yields_same_key_set() {
        let corpus = vec![
            seq(&[F::Target, F::Up, F::Number]),
            seq(&[F::Other, F::Down, F::Plain]),
            seq(&[F::Negator, F::Positive]),
        ];
        let mut reversed = corpus.clone();
        reversed.reverse();
        let a = VectorSpace::fit(SpaceKind::Ubt, &corpus).unwrap();
        let b = VectorSpace::fit(SpaceKind::Ubt, &reversed).unwrap();
        let ka: HashSet<_> = a.keys().iter().copied().collect();
        let kb: HashSet<_> = b.keys().iter().copied().collect();
        assert_eq!(ka, kb);
        assert_eq!(a.dimension(), b.dimension());
    }

    #[test]
    fn sidecar_round_trip_preserves_index_order() {
        let corpus = vec![seq(&[F::Target, F::Up, F::Number]), seq(&[F::Other, F::Down])];
        for kind in [SpaceKind::Ubt, SpaceKind::Lps] {
            let space = VectorSpace::fit(kind, &corpus).unwrap();
            let json = space.to_sidecar_json();
            let back = VectorSpace::from_sidecar_json(&json).unwrap();
            assert_eq!(back.kind(), space.kind());
            assert_eq!(back.keys(), space.keys());
            assert_eq!(back.max_len(), space.max_len());
            let probe = seq(&[F::Target, F::Up]);
            assert_eq!(back.transform(&probe), space.transform(&probe));
        }
    }
}
