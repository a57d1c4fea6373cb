use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{argmax, loss, MlpModel, NUM_CLASSES};
use crate::corpus::PriorityLevel;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// A feature vector with its (possibly missing) target class.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub features: FeatureVector,
    pub label: Option<PriorityLevel>,
}

impl Example {
    pub fn new(features: FeatureVector, label: PriorityLevel) -> Self {
        Self {
            features,
            label: Some(label),
        }
    }

    fn class(&self, index: usize) -> Result<usize> {
        self.label.map(PriorityLevel::index).ok_or(Error::Unlabeled(index))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 10,
            batch_size: 64,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 42,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.epochs == 0 {
            return bad("epochs must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("Adam betas must lie in [0, 1)");
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return bad("Adam epsilon must be positive");
        }
        Ok(())
    }
}

/// Gradients laid out like [`MlpModel::parameters`]: W1, b1, W2, b2, W3, b3.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub buffers: [Vec<f64>; 6],
}

impl Gradients {
    fn zeros_like(model: &MlpModel) -> Self {
        Self {
            buffers: model.parameters().map(|p| vec![0.0; p.len()]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchGradients {
    pub gradients: Gradients,
    /// Mean cross-entropy over the batch.
    pub loss: f64,
    /// Samples whose training-mode prediction matched the label.
    pub correct: usize,
}

/// Gradient of the mean batch cross-entropy. Dropout masks are drawn from
/// `rng` when the model's dropout rate is positive.
pub fn gradients(model: &MlpModel, batch: &[&Example], rng: &mut impl Rng) -> Result<BatchGradients> {
    if batch.is_empty() {
        return Err(Error::Empty("gradient batch"));
    }
    let mut grads = Gradients::zeros_like(model);
    let scale = 1.0 / batch.len() as f64;
    let mut total_loss = 0.0;
    let mut correct = 0;

    let (h1_n, h2_n) = (model.hidden1.outputs, model.hidden2.outputs);
    for (i, example) in batch.iter().enumerate() {
        let label = example.class(i)?;
        let pass = model.forward(&example.features, true, rng)?;
        total_loss += loss(&pass.probabilities, label)?;
        if argmax(&pass.probabilities) == label {
            correct += 1;
        }

        let [gw1, gb1, gw2, gb2, gw3, gb3] = &mut grads.buffers;

        // Softmax + cross-entropy: dL/dlogits = p - onehot.
        let mut dlogits = pass.probabilities;
        dlogits[label] -= 1.0;
        dlogits.iter_mut().for_each(|d| *d *= scale);

        let mut dh2 = vec![0.0; h2_n];
        for (k, &h) in pass.h2.iter().enumerate() {
            let row = &model.output.weights[k * NUM_CLASSES..(k + 1) * NUM_CLASSES];
            let grow = &mut gw3[k * NUM_CLASSES..(k + 1) * NUM_CLASSES];
            for j in 0..NUM_CLASSES {
                grow[j] += h * dlogits[j];
                dh2[k] += row[j] * dlogits[j];
            }
        }
        for (b, d) in gb3.iter_mut().zip(&dlogits) {
            *b += d;
        }

        let dz2: Vec<f64> = dh2
            .iter()
            .zip(&pass.z2)
            .map(|(&d, &z)| if z > 0.0 { d } else { 0.0 })
            .collect();
        let mut dh1 = vec![0.0; h1_n];
        for (k, &h) in pass.h1.iter().enumerate() {
            let row = &model.hidden2.weights[k * h2_n..(k + 1) * h2_n];
            let grow = &mut gw2[k * h2_n..(k + 1) * h2_n];
            for j in 0..h2_n {
                grow[j] += h * dz2[j];
                dh1[k] += row[j] * dz2[j];
            }
        }
        for (b, d) in gb2.iter_mut().zip(&dz2) {
            *b += d;
        }

        let dz1: Vec<f64> = dh1
            .iter()
            .zip(&pass.z1)
            .map(|(&d, &z)| if z > 0.0 { d } else { 0.0 })
            .collect();
        // Only rows of W1 for surviving non-zero inputs receive gradient.
        for &(k, x) in &pass.input {
            let grow = &mut gw1[k * h1_n..(k + 1) * h1_n];
            for (g, d) in grow.iter_mut().zip(&dz1) {
                *g += x * d;
            }
        }
        for (b, d) in gb1.iter_mut().zip(&dz1) {
            *b += d;
        }
    }

    Ok(BatchGradients {
        gradients: grads,
        loss: total_loss * scale,
        correct,
    })
}

/// Adam with bias-corrected moment estimates.
#[derive(Debug, Clone)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: u64,
    m: [Vec<f64>; 6],
    v: [Vec<f64>; 6],
}

impl Adam {
    pub fn new(model: &MlpModel, config: &TrainConfig) -> Self {
        let zeros = || model.parameters().map(|p| vec![0.0; p.len()]);
        Self {
            learning_rate: config.learning_rate,
            beta1: config.beta1,
            beta2: config.beta2,
            epsilon: config.epsilon,
            step: 0,
            m: zeros(),
            v: zeros(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn step(&mut self, model: &mut MlpModel, grads: &Gradients) -> Result<()> {
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.learning_rate, self.epsilon);
        for (k, params) in model.parameters_mut().into_iter().enumerate() {
            let g = &grads.buffers[k];
            if g.len() != params.len() {
                return Err(Error::LengthMismatch {
                    left: params.len(),
                    right: g.len(),
                });
            }
            let (m, v) = (&mut self.m[k], &mut self.v[k]);
            for i in 0..params.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        if !model.is_finite() {
            return Err(Error::NonFinite { step: self.step });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    /// 1-based.
    pub epoch: usize,
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub validation_loss: f64,
    pub validation_accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingHistory {
    pub epochs: Vec<EpochStats>,
}

/// Best model seen during training, selected by validation accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub model: MlpModel,
    pub epoch: usize,
    pub validation_accuracy: f64,
}

/// Mean inference-mode loss and accuracy.
pub fn evaluate(model: &MlpModel, examples: &[Example]) -> Result<(f64, f64)> {
    if examples.is_empty() {
        return Err(Error::Empty("evaluation set"));
    }
    let mut total = 0.0;
    let mut correct = 0;
    for (i, example) in examples.iter().enumerate() {
        let label = example.class(i)?;
        let p = model.probabilities(&example.features)?;
        total += loss(&p, label)?;
        if argmax(&p) == label {
            correct += 1;
        }
    }
    let n = examples.len() as f64;
    Ok((total / n, correct as f64 / n))
}

/// Mini-batch training with per-epoch shuffling. Returns the parameters from
/// the epoch with the highest validation accuracy (earliest on ties) and the
/// full per-epoch history. Everything random derives from `config.seed`.
pub fn train(
    mut model: MlpModel,
    train_set: &[Example],
    validation: &[Example],
    config: &TrainConfig,
) -> Result<(Checkpoint, TrainingHistory)> {
    config.validate()?;
    if train_set.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if validation.is_empty() {
        return Err(Error::Empty("validation set"));
    }
    for (i, example) in train_set.iter().chain(validation).enumerate() {
        example.class(i)?;
        if example.features.dim() != model.input_dim {
            return Err(Error::DimensionMismatch {
                expected: model.input_dim,
                found: example.features.dim(),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut adam = Adam::new(&model, config);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut history = TrainingHistory::default();
    let mut best: Option<Checkpoint> = None;

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut correct = 0;
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<&Example> = chunk.iter().map(|&i| &train_set[i]).collect();
            let step = gradients(&model, &batch, &mut rng)?;
            loss_sum += step.loss * batch.len() as f64;
            correct += step.correct;
            adam.step(&mut model, &step.gradients)?;
        }
        let n = train_set.len() as f64;
        let (validation_loss, validation_accuracy) = evaluate(&model, validation)?;
        let stats = EpochStats {
            epoch,
            train_loss: loss_sum / n,
            train_accuracy: correct as f64 / n,
            validation_loss,
            validation_accuracy,
        };
        log::info!(
            "epoch {epoch}: loss {:.4} acc {:.4} val_loss {:.4} val_acc {:.4}",
            stats.train_loss,
            stats.train_accuracy,
            stats.validation_loss,
            stats.validation_accuracy
        );
        history.epochs.push(stats);

        if best
            .as_ref()
            .is_none_or(|b| validation_accuracy > b.validation_accuracy)
        {
            best = Some(Checkpoint {
                model: model.clone(),
                epoch,
                validation_accuracy,
            });
        }
    }

    Ok((best.expect("at least one epoch"), history))
}
