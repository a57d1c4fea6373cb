//! Four-class priority classifier.
//!
//! Hashed count features -> inverted dropout (rate 0.2, training only) ->
//! dense(128, ReLU) -> dense(64, ReLU) -> dense(4) -> softmax. Trained with
//! sparse categorical cross-entropy and Adam; see [`train`].

mod checkpoint;
pub mod synthetic;
mod train;

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::PriorityLevel;
use crate::error::{Error, Result};
use crate::features::{vectorize, FeatureVector};
use crate::preprocess::TokenizedReview;

pub use checkpoint::{load_checkpoint, load_checkpoint_expecting, read_checkpoint, save_checkpoint, write_checkpoint};
pub use train::{
    evaluate, gradients, train, Adam, BatchGradients, Checkpoint, EpochStats, Example, Gradients, TrainConfig,
    TrainingHistory,
};

pub const HIDDEN1: usize = 128;
pub const HIDDEN2: usize = 64;
pub const NUM_CLASSES: usize = 4;
pub const DEFAULT_DROPOUT: f64 = 0.2;
/// Floor applied to probabilities before taking the log.
pub const PROB_CLAMP: f64 = 1e-12;

pub type Probabilities = [f64; NUM_CLASSES];

/// Fully connected layer; `weights[i * outputs + j]` connects input `i` to
/// output `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    /// Scaled-uniform init, bound `sqrt(6 / (fan_in + fan_out))`, zero bias.
    fn glorot_uniform(inputs: usize, outputs: usize, rng: &mut impl Rng) -> Self {
        let bound = glorot_bound(inputs, outputs);
        let dist = Uniform::new_inclusive(-bound, bound);
        let mut layer = Self::zeros(inputs, outputs);
        for w in &mut layer.weights {
            *w = dist.sample(rng);
        }
        layer
    }

    /// `bias + x^T W` for a dense input.
    fn affine(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.bias.clone();
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let row = &self.weights[i * self.outputs..(i + 1) * self.outputs];
            for (o, w) in out.iter_mut().zip(row) {
                *o += xi * w;
            }
        }
        out
    }

    /// `bias + x^T W` for a sparse input given as `(index, value)` pairs.
    fn affine_sparse(&self, x: &[(usize, f64)]) -> Vec<f64> {
        let mut out = self.bias.clone();
        for &(i, xi) in x {
            let row = &self.weights[i * self.outputs..(i + 1) * self.outputs];
            for (o, w) in out.iter_mut().zip(row) {
                *o += xi * w;
            }
        }
        out
    }
}

pub fn glorot_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub input_dim: usize,
    pub dropout_rate: f64,
    /// Seed the model was initialized and trained with.
    pub seed: u64,
    pub hidden1: Dense,
    pub hidden2: Dense,
    pub output: Dense,
}

/// Activations of one forward pass, kept for backpropagation.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardPass {
    /// Non-zero input entries after dropout masking and rescaling.
    pub input: Vec<(usize, f64)>,
    pub z1: Vec<f64>,
    pub h1: Vec<f64>,
    pub z2: Vec<f64>,
    pub h2: Vec<f64>,
    pub logits: Probabilities,
    pub probabilities: Probabilities,
}

fn relu(z: &[f64]) -> Vec<f64> {
    z.iter().map(|&v| v.max(0.0)).collect()
}

/// Softmax with max subtraction.
pub fn softmax(logits: &[f64; NUM_CLASSES]) -> Probabilities {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; NUM_CLASSES];
    let mut sum = 0.0;
    for (o, &l) in out.iter_mut().zip(logits) {
        *o = (l - max).exp();
        sum += *o;
    }
    for o in &mut out {
        *o /= sum;
    }
    out
}

/// Cross-entropy of one sample: `-ln(max(p[label], 1e-12))`.
pub fn loss(probabilities: &Probabilities, label: usize) -> Result<f64> {
    let p = probabilities
        .get(label)
        .ok_or_else(|| Error::InvalidArgument(format!("class index {label} out of range 0..{NUM_CLASSES}")))?;
    Ok(-p.max(PROB_CLAMP).ln())
}

/// Index of the largest entry; the lowest index wins ties.
pub fn argmax(values: &Probabilities) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Fresh model with Glorot-uniform weights and zero biases.
pub fn init_model(input_dim: usize, seed: u64) -> Result<MlpModel> {
    if input_dim == 0 {
        return Err(Error::InvalidArgument("input dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(MlpModel {
        input_dim,
        dropout_rate: DEFAULT_DROPOUT,
        seed,
        hidden1: Dense::glorot_uniform(input_dim, HIDDEN1, &mut rng),
        hidden2: Dense::glorot_uniform(HIDDEN1, HIDDEN2, &mut rng),
        output: Dense::glorot_uniform(HIDDEN2, NUM_CLASSES, &mut rng),
    })
}

impl MlpModel {
    /// Forward pass. In training mode every non-zero input is dropped with
    /// probability `dropout_rate` and survivors are scaled by
    /// `1 / (1 - dropout_rate)`; `rng` is not touched otherwise.
    pub fn forward(&self, x: &FeatureVector, train_mode: bool, rng: &mut impl Rng) -> Result<ForwardPass> {
        if x.dim() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                found: x.dim(),
            });
        }
        let drop = train_mode && self.dropout_rate > 0.0;
        let keep_scale = 1.0 / (1.0 - self.dropout_rate);
        let input: Vec<(usize, f64)> = x
            .nonzero()
            .filter_map(|(i, v)| {
                if !drop {
                    return Some((i, v));
                }
                (rng.gen::<f64>() >= self.dropout_rate).then_some((i, v * keep_scale))
            })
            .collect();

        let z1 = self.hidden1.affine_sparse(&input);
        let h1 = relu(&z1);
        let z2 = self.hidden2.affine(&h1);
        let h2 = relu(&z2);
        let raw = self.output.affine(&h2);
        let logits: Probabilities = raw.try_into().expect("output layer has NUM_CLASSES units");
        let probabilities = softmax(&logits);
        Ok(ForwardPass {
            input,
            z1,
            h1,
            z2,
            h2,
            logits,
            probabilities,
        })
    }

    /// Inference-mode class probabilities.
    pub fn probabilities(&self, x: &FeatureVector) -> Result<Probabilities> {
        // Inference never draws from the rng.
        let mut unused = ChaCha8Rng::seed_from_u64(0);
        Ok(self.forward(x, false, &mut unused)?.probabilities)
    }

    pub fn predict_features(&self, x: &FeatureVector) -> Result<(PriorityLevel, Probabilities)> {
        let probabilities = self.probabilities(x)?;
        let level = PriorityLevel::from_index(argmax(&probabilities)).expect("four classes");
        Ok((level, probabilities))
    }

    pub fn parameter_count(&self) -> usize {
        [&self.hidden1, &self.hidden2, &self.output]
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }

    /// Parameter buffers in a fixed order: W1, b1, W2, b2, W3, b3.
    pub fn parameters(&self) -> [&[f64]; 6] {
        [
            &self.hidden1.weights,
            &self.hidden1.bias,
            &self.hidden2.weights,
            &self.hidden2.bias,
            &self.output.weights,
            &self.output.bias,
        ]
    }

    pub fn parameters_mut(&mut self) -> [&mut Vec<f64>; 6] {
        [
            &mut self.hidden1.weights,
            &mut self.hidden1.bias,
            &mut self.hidden2.weights,
            &mut self.hidden2.bias,
            &mut self.output.weights,
            &mut self.output.bias,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.parameters().iter().all(|p| p.iter().all(|v| v.is_finite()))
    }
}

/// Vectorizes the review with the model's input dimension and classifies it.
pub fn predict(model: &MlpModel, review: &TokenizedReview) -> Result<(PriorityLevel, Probabilities)> {
    let x = vectorize(&review.tokens, model.input_dim)?;
    model.predict_features(&x)
}
