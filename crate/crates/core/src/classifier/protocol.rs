//! Repeated random-split evaluation with median reporting.
//!
//! The corpus is partitioned independently for every split (80/20 by
//! default), the vector space is fitted on the training side only, and
//! per-class one-vs-rest accuracy and F1 are scored on the held-out side.
//! Medians are the headline aggregate; means and standard deviations are
//! reported alongside.

use super::{predict, train, LossKind, TrainConfig, TrainError};
use crate::lexicon::FeatureSequence;
use crate::vectorizer::{SpaceKind, VectorSpace};
use crate::Sentiment;
use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Configuration of the split protocol.
#[derive(Clone, Copy, Debug)]
pub struct ProtocolConfig {
    pub repr: SpaceKind,
    pub splits: usize,
    pub train_frac: f64,
    pub train: TrainConfig,
}

impl ProtocolConfig {
    pub fn new(repr: SpaceKind, loss: LossKind, seed: u64) -> Self {
        ProtocolConfig {
            repr,
            splits: 31,
            train_frac: 0.8,
            train: TrainConfig {
                loss,
                seed,
                ..TrainConfig::default()
            },
        }
    }
}

/// One class's metrics on one split.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SplitScore {
    pub split: usize,
    pub class: Sentiment,
    pub accuracy: f64,
    pub f1: f64,
}

/// Median / mean / standard deviation over the configured splits.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MetricSummary {
    pub median: f64,
    pub mean: f64,
    pub sd: f64,
}

impl MetricSummary {
    fn over(values: &[f64]) -> Self {
        MetricSummary {
            median: median(values),
            mean: mean(values),
            sd: sample_sd(values),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClassSummary {
    pub class: Sentiment,
    pub accuracy: MetricSummary,
    pub f1: MetricSummary,
}

/// Full protocol output: per-split scores plus per-class aggregates.
#[derive(Clone, Debug, Serialize)]
pub struct EvalReport {
    pub splits: usize,
    pub seed: u64,
    pub per_split: Vec<SplitScore>,
    pub per_class: Vec<ClassSummary>,
    /// Plain multiclass accuracy, aggregated the same way.
    pub overall_accuracy: MetricSummary,
}

/// One-vs-rest view of a multiclass prediction run for one class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Compute binary accuracy, precision, recall, and F1 for `class`,
/// treating gold and predicted labels as `class` vs rest. F1 is
/// `2PR/(P+R)`, defined as 0 when `P + R = 0`.
pub fn one_vs_rest_metrics(gold: &[Sentiment], pred: &[Sentiment], class: Sentiment) -> ClassMetrics {
    assert_eq!(gold.len(), pred.len());
    let (mut tp, mut tn, mut fp, mut fne) = (0usize, 0usize, 0usize, 0usize);
    for (g, p) in gold.iter().zip(pred) {
        match (*g == class, *p == class) {
            (true, true) => tp += 1,
            (false, false) => tn += 1,
            (false, true) => fp += 1,
            (true, false) => fne += 1,
        }
    }
    let total = gold.len() as f64;
    let accuracy = if gold.is_empty() { 0.0 } else { (tp + tn) as f64 / total };
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fne == 0 { 0.0 } else { tp as f64 / (tp + fne) as f64 };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    ClassMetrics {
        accuracy,
        precision,
        recall,
        f1,
    }
}

/// Run the repeated-split protocol on a labeled corpus of feature
/// sequences.
///
/// Per-split randomness is derived from the config seed by a counter
/// scheme: split `i` shuffles the partition with ChaCha stream `2i` and
/// trains with a seed drawn from stream `2i + 1`, so any split can be
/// re-run in isolation.
pub fn evaluate_protocol(
    corpus: &[FeatureSequence],
    cfg: &ProtocolConfig,
) -> Result<EvalReport, TrainError> {
    if corpus.len() < 10 {
        return Err(TrainError::CorpusTooSmall(corpus.len()));
    }
    let labels: Vec<Sentiment> = corpus
        .iter()
        .enumerate()
        .map(|(i, seq)| seq.label.ok_or(TrainError::MissingLabel(i)))
        .collect::<Result<_, _>>()?;

    let seed = cfg.train.seed;
    let mut per_split = Vec::with_capacity(cfg.splits * 3);
    let mut overall = Vec::with_capacity(cfg.splits);

    for split in 0..cfg.splits {
        let mut partition_rng = ChaCha8Rng::seed_from_u64(seed);
        partition_rng.set_stream(2 * split as u64);
        let mut order: Vec<usize> = (0..corpus.len()).collect();
        order.shuffle(&mut partition_rng);

        let train_n = ((corpus.len() as f64) * cfg.train_frac).floor() as usize;
        if train_n == 0 {
            return Err(TrainError::DegenerateSplit {
                split,
                side: "train",
                train_frac: cfg.train_frac,
            });
        }
        if train_n == corpus.len() {
            return Err(TrainError::DegenerateSplit {
                split,
                side: "test",
                train_frac: cfg.train_frac,
            });
        }
        let (train_idx, test_idx) = order.split_at(train_n);

        let train_seqs: Vec<FeatureSequence> =
            train_idx.iter().map(|&i| corpus[i].clone()).collect();
        let space = VectorSpace::fit(cfg.repr, &train_seqs)?;
        let train_data: Vec<_> = train_idx
            .iter()
            .map(|&i| (space.transform(&corpus[i]), labels[i]))
            .collect();

        let mut seed_rng = ChaCha8Rng::seed_from_u64(seed);
        seed_rng.set_stream(2 * split as u64 + 1);
        let split_cfg = TrainConfig {
            seed: seed_rng.next_u64(),
            ..cfg.train
        };
        let model = train(&space, &train_data, &split_cfg)?;

        let gold: Vec<Sentiment> = test_idx.iter().map(|&i| labels[i]).collect();
        let pred: Vec<Sentiment> = test_idx
            .iter()
            .map(|&i| predict(&model, &space.transform(&corpus[i])).0)
            .collect();

        for class in Sentiment::ALL {
            let m = one_vs_rest_metrics(&gold, &pred, class);
            per_split.push(SplitScore {
                split,
                class,
                accuracy: m.accuracy,
                f1: m.f1,
            });
        }
        let correct = gold.iter().zip(&pred).filter(|(g, p)| g == p).count();
        overall.push(correct as f64 / gold.len() as f64);
    }

    let per_class = Sentiment::ALL
        .iter()
        .map(|&class| {
            let acc: Vec<f64> = per_split
                .iter()
                .filter(|s| s.class == class)
                .map(|s| s.accuracy)
                .collect();
            let f1: Vec<f64> = per_split
                .iter()
                .filter(|s| s.class == class)
                .map(|s| s.f1)
                .collect();
            ClassSummary {
                class,
                accuracy: MetricSummary::over(&acc),
                f1: MetricSummary::over(&f1),
            }
        })
        .collect();

    Ok(EvalReport {
        splits: cfg.splits,
        seed,
        per_split,
        per_class,
        overall_accuracy: MetricSummary::over(&overall),
    })
}

/// Median of a non-empty slice (mean of the middle pair for even lengths).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    }
}

pub fn mean(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n − 1 denominator); 0 for a single value.
pub fn sample_sd(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64;
    var.sqrt()
}
