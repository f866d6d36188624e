//! Multiclass linear models over sparse feature vectors.
//!
//! Two loss functions share one training loop: multinomial logistic
//! regression (softmax cross-entropy) and a one-vs-rest squared-hinge
//! model standing in for a linear SVM. Both are trained by mini-batch
//! gradient descent with L2 regularization on the weights; training is
//! deterministic for a fixed seed. Other learners (boosted trees, MLPs)
//! can plug in behind the same train/predict contract but are not part
//! of this crate.

mod protocol;

pub use protocol::{
    evaluate_protocol, mean, median, one_vs_rest_metrics, sample_sd, ClassMetrics, ClassSummary,
    EvalReport, MetricSummary, ProtocolConfig, SplitScore,
};

use crate::vectorizer::{SparseVector, VectorSpace};
use crate::Sentiment;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Softmax,
    Hinge,
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossKind::Softmax => "softmax",
            LossKind::Hinge => "hinge",
        })
    }
}

impl FromStr for LossKind {
    type Err = TrainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "softmax" => Ok(LossKind::Softmax),
            "hinge" => Ok(LossKind::Hinge),
            other => Err(TrainError::UnknownLoss(other.to_string())),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("unknown loss kind `{0}` (expected softmax or hinge)")]
    UnknownLoss(String),
    #[error("training data is empty")]
    EmptyData,
    #[error("training data contains only the `{0}` class")]
    SingleClass(Sentiment),
    #[error("evaluation corpus has {0} instances; at least 10 are required")]
    CorpusTooSmall(usize),
    #[error("instance {0} has no gold label")]
    MissingLabel(usize),
    #[error("split {split} left no {side} instances (train_frac {train_frac})")]
    DegenerateSplit {
        split: usize,
        side: &'static str,
        train_frac: f64,
    },
    #[error("model file parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model file: {0}")]
    Space(#[from] crate::vectorizer::VectorizerError),
    #[error("model file: unsupported version {0}")]
    Version(u32),
    #[error("model dimension {model} does not match vector space dimension {space}")]
    DimensionMismatch { model: usize, space: usize },
    #[error("model file I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Hyper-parameters for one training run.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TrainConfig {
    pub loss: LossKind,
    /// Initial step size; epoch `e` uses
    /// `learning_rate / (1 + lr_decay * e)`.
    pub learning_rate: f64,
    pub lr_decay: f64,
    pub epochs: usize,
    pub l2: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            loss: LossKind::Softmax,
            learning_rate: 0.05,
            lr_decay: 0.02,
            epochs: 200,
            l2: 1e-4,
            batch_size: 32,
            seed: 0,
        }
    }
}

/// Trained linear model: one weight row and bias per sentiment class, in
/// canonical class order (positive, negative, neutral).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub loss: LossKind,
    /// `weights[c][j]` is the weight of column `j` for class `c`.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub dimension: usize,
}

impl LinearModel {
    fn zeros(loss: LossKind, dimension: usize) -> Self {
        LinearModel {
            loss,
            weights: vec![vec![0.0; dimension]; 3],
            bias: vec![0.0; 3],
            dimension,
        }
    }

    fn raw_scores(&self, vec: &SparseVector) -> [f64; 3] {
        [
            vec.dot(&self.weights[0]) + self.bias[0],
            vec.dot(&self.weights[1]) + self.bias[1],
            vec.dot(&self.weights[2]) + self.bias[2],
        ]
    }
}

/// Regularized training objective on a batch: mean per-sample loss plus
/// `l2 * sum(weights^2)`. This is exactly the function the training loop
/// descends, which makes it the reference for finite-difference checks.
pub fn objective(
    loss: LossKind,
    weights: &[Vec<f64>],
    bias: &[f64],
    batch: &[(SparseVector, Sentiment)],
    l2: f64,
) -> f64 {
    let n = batch.len() as f64;
    let mut total = 0.0;
    for (vec, label) in batch {
        let z = [
            vec.dot(&weights[0]) + bias[0],
            vec.dot(&weights[1]) + bias[1],
            vec.dot(&weights[2]) + bias[2],
        ];
        total += match loss {
            LossKind::Softmax => {
                let p = softmax(z);
                -p[label.index()].max(1e-300).ln()
            }
            LossKind::Hinge => {
                let mut sample = 0.0;
                for c in 0..3 {
                    let y = if label.index() == c { 1.0 } else { -1.0 };
                    let slack = (1.0 - y * z[c]).max(0.0);
                    sample += slack * slack;
                }
                sample
            }
        };
    }
    let reg: f64 = weights.iter().flatten().map(|w| w * w).sum();
    total / n + l2 * reg
}

/// Analytic gradient of [`objective`] with respect to weights and bias.
pub fn objective_gradient(
    loss: LossKind,
    weights: &[Vec<f64>],
    bias: &[f64],
    batch: &[(SparseVector, Sentiment)],
    l2: f64,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let dim = weights[0].len();
    let n = batch.len() as f64;
    let mut grad_w = vec![vec![0.0; dim]; 3];
    let mut grad_b = vec![0.0; 3];
    for (vec, label) in batch {
        let z = [
            vec.dot(&weights[0]) + bias[0],
            vec.dot(&weights[1]) + bias[1],
            vec.dot(&weights[2]) + bias[2],
        ];
        let dz: [f64; 3] = match loss {
            LossKind::Softmax => {
                let mut p = softmax(z);
                p[label.index()] -= 1.0;
                p
            }
            LossKind::Hinge => {
                let mut d = [0.0; 3];
                for c in 0..3 {
                    let y = if label.index() == c { 1.0 } else { -1.0 };
                    let slack = (1.0 - y * z[c]).max(0.0);
                    d[c] = -2.0 * y * slack;
                }
                d
            }
        };
        for c in 0..3 {
            let scale = dz[c] / n;
            for &(j, v) in vec.entries() {
                grad_w[c][j] += scale * v;
            }
            grad_b[c] += scale;
        }
    }
    for c in 0..3 {
        for j in 0..dim {
            grad_w[c][j] += 2.0 * l2 * weights[c][j];
        }
    }
    (grad_w, grad_b)
}

fn softmax(z: [f64; 3]) -> [f64; 3] {
    let m = z[0].max(z[1]).max(z[2]);
    let e = [(z[0] - m).exp(), (z[1] - m).exp(), (z[2] - m).exp()];
    let sum = e[0] + e[1] + e[2];
    [e[0] / sum, e[1] / sum, e[2] / sum]
}

/// Train a linear model by seeded mini-batch gradient descent.
///
/// Weights start at zero, batches are reshuffled every epoch from a
/// ChaCha stream, and the run is bit-reproducible for a fixed config.
pub fn train(
    space: &VectorSpace,
    data: &[(SparseVector, Sentiment)],
    cfg: &TrainConfig,
) -> Result<LinearModel, TrainError> {
    Ok(train_with_history(space, data, cfg, false)?.0)
}

/// As [`train`], optionally recording the full-data objective before
/// training and after every epoch.
pub fn train_with_history(
    space: &VectorSpace,
    data: &[(SparseVector, Sentiment)],
    cfg: &TrainConfig,
    record_history: bool,
) -> Result<(LinearModel, Vec<f64>), TrainError> {
    if data.is_empty() {
        return Err(TrainError::EmptyData);
    }
    let first = data[0].1;
    if data.iter().all(|(_, label)| *label == first) {
        return Err(TrainError::SingleClass(first));
    }

    let mut model = LinearModel::zeros(cfg.loss, space.dimension());
    let mut history = Vec::new();
    if record_history {
        history.push(objective(cfg.loss, &model.weights, &model.bias, data, cfg.l2));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let batch_size = cfg.batch_size.max(1);
    let mut batch: Vec<(SparseVector, Sentiment)> = Vec::with_capacity(batch_size);

    for epoch in 0..cfg.epochs {
        let rate = cfg.learning_rate / (1.0 + cfg.lr_decay * epoch as f64);
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch_size) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| data[i].clone()));
            let (grad_w, grad_b) =
                objective_gradient(cfg.loss, &model.weights, &model.bias, &batch, cfg.l2);
            for c in 0..3 {
                for j in 0..model.dimension {
                    model.weights[c][j] -= rate * grad_w[c][j];
                }
                model.bias[c] -= rate * grad_b[c];
            }
        }
        if record_history {
            history.push(objective(cfg.loss, &model.weights, &model.bias, data, cfg.l2));
        }
    }
    Ok((model, history))
}

/// Predict a label and per-class scores for one vector.
///
/// The label is the argmax score with ties broken by canonical class
/// order; softmax scores form a probability simplex, hinge scores are the
/// raw one-vs-rest margins.
pub fn predict(model: &LinearModel, vec: &SparseVector) -> (Sentiment, [f64; 3]) {
    let z = model.raw_scores(vec);
    let scores = match model.loss {
        LossKind::Softmax => softmax(z),
        LossKind::Hinge => z,
    };
    let mut best = 0;
    for c in 1..3 {
        if scores[c] > scores[best] {
            best = c;
        }
    }
    (Sentiment::from_index(best).unwrap(), scores)
}

/// A model bundled with the vector space it was trained on, as persisted
/// in the versioned model file.
pub struct TrainedPackage {
    pub model: LinearModel,
    pub space: VectorSpace,
}

const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    loss: LossKind,
    classes: Vec<String>,
    bias: Vec<f64>,
    weights: Vec<Vec<f64>>,
    space: serde_json::Value,
}

impl TrainedPackage {
    pub fn new(model: LinearModel, space: VectorSpace) -> Result<Self, TrainError> {
        if model.dimension != space.dimension() {
            return Err(TrainError::DimensionMismatch {
                model: model.dimension,
                space: space.dimension(),
            });
        }
        Ok(TrainedPackage { model, space })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ModelFile {
            version: MODEL_VERSION,
            loss: self.model.loss,
            classes: Sentiment::ALL.iter().map(|s| s.as_str().to_string()).collect(),
            bias: self.model.bias.clone(),
            weights: self.model.weights.clone(),
            space: self.space.to_sidecar_json(),
        })
        .expect("model serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, TrainError> {
        let file: ModelFile = serde_json::from_value(value.clone())?;
        if file.version != MODEL_VERSION {
            return Err(TrainError::Version(file.version));
        }
        let space = VectorSpace::from_sidecar_json(&file.space)?;
        let model = LinearModel {
            loss: file.loss,
            dimension: space.dimension(),
            weights: file.weights,
            bias: file.bias,
        };
        TrainedPackage::new(model, space)
    }

    pub fn write_json<W: Write>(&self, mut writer: W) -> Result<(), TrainError> {
        let text = serde_json::to_string_pretty(&self.to_json())?;
        writer.write_all(text.as_bytes())?;
        writer.write_all(b"\n")?;
        Ok(())
    }

    pub fn read_json<R: Read>(mut reader: R) -> Result<Self, TrainError> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        Self::from_json(&value)
    }
}
