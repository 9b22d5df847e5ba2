use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{init_model, update, NnlmConfig, NnlmModel, OptimizerState};
use crate::corpus::{extract_contexts, ContextSet, EncodedCorpus, SplitLabel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Rows per forward pass when measuring cost over a whole split.
const EVAL_CHUNK: usize = 512;

/// Mixed into the init seed to get an independent batch-order stream.
const SHUFFLE_SALT: u64 = 0x5EED_0F0B_A7C4_0DE5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_cost: f64,
    pub valid_cost: f64,
    pub learning_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    /// Validation cost of the freshly initialized model.
    pub initial_valid_cost: f64,
    pub epochs: Vec<EpochRecord>,
    pub stopped_early: bool,
    /// Epoch whose weights were returned; 0 means the initial weights.
    pub best_epoch: usize,
}

impl TrainHistory {
    pub fn best_valid_cost(&self) -> f64 {
        if self.best_epoch == 0 {
            self.initial_valid_cost
        } else {
            self.epochs[self.best_epoch - 1].valid_cost
        }
    }
}

/// Learning rate in effect during `epoch` (1-based): multiplied by the decay
/// factor once per epoch from `decay_start_epoch` on.
pub fn learning_rate_at(config: &NnlmConfig, epoch: usize) -> f64 {
    let decays = (epoch + 1).saturating_sub(config.decay_start_epoch.max(1));
    config.learning_rate * config.decay_factor.powi(decays as i32)
}

/// Mean cross-entropy over a whole pair set, evaluated in chunks.
pub fn mean_cost<F: Scalar>(model: &NnlmModel<F>, pairs: &ContextSet) -> f64 {
    let mut total = 0.0;
    let rows: Vec<usize> = (0..pairs.len()).collect();
    for chunk in rows.chunks(EVAL_CHUNK) {
        let batch = pairs.select(chunk);
        let cache = model.forward_unchecked(&batch);
        for (i, &t) in batch.targets().iter().enumerate() {
            total -= cache.log_prob(i, t).as_f64();
        }
    }
    total / pairs.len() as f64
}

/// Trains on the corpus's training split with validation-based early
/// stopping. `config.vocab_size` is taken from the corpus.
pub fn train<F: Scalar>(
    corpus: &EncodedCorpus,
    config: &NnlmConfig,
) -> Result<(NnlmModel<F>, TrainHistory)> {
    let mut config = config.clone();
    config.vocab_size = corpus.vocab_size();
    config.validate()?;
    let (n, t) = (config.context_size, config.target_pos);
    let train_pairs_set = extract_contexts(corpus.split(SplitLabel::Train), n, t)?;
    let valid_pairs_set = extract_contexts(corpus.split(SplitLabel::Valid), n, t)?;
    train_pairs(&train_pairs_set, &valid_pairs_set, &config)
}

/// The training procedure on prepared pair sets.
///
/// Each epoch reshuffles the training pairs, runs forward → backward → update
/// per mini-batch (the last batch may be short), then measures validation
/// cost. As soon as validation cost rises above the previous epoch's, training
/// stops and the previous weights are returned.
pub fn train_pairs<F: Scalar>(
    train: &ContextSet,
    valid: &ContextSet,
    config: &NnlmConfig,
) -> Result<(NnlmModel<F>, TrainHistory)> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::Empty("training context pairs"));
    }
    if valid.is_empty() {
        return Err(Error::Empty("validation context pairs"));
    }
    let v = config.vocab_size;
    for set in [train, valid] {
        if set.width() != config.context_width() {
            return Err(Error::ContextLength {
                got: set.width(),
                expected: config.context_width(),
            });
        }
        for (ctx, target) in set.iter() {
            if let Some(&bad) = ctx.iter().chain([&target]).find(|&&w| w >= v) {
                return Err(Error::IndexOutOfRange { index: bad, vocab: v });
            }
        }
    }

    let mut model: NnlmModel<F> = init_model(config)?;
    let mut state = OptimizerState::new(&model);
    let mut rng = ChaCha8Rng::seed_from_u64(config.init_seed ^ SHUFFLE_SALT);
    let mut order: Vec<usize> = (0..train.len()).collect();

    let initial_valid_cost = mean_cost(&model, valid);
    let mut history = TrainHistory {
        initial_valid_cost,
        epochs: Vec::with_capacity(config.epochs),
        stopped_early: false,
        best_epoch: 0,
    };
    let mut best = model.clone();
    let mut prev_valid = initial_valid_cost;

    for epoch in 1..=config.epochs {
        let lr = learning_rate_at(config, epoch);
        order.shuffle(&mut rng);
        let mut train_total = 0.0;
        for (iteration, rows) in order.chunks(config.batch_size).enumerate() {
            let batch = train.select(rows);
            let cache = model.forward_unchecked(&batch);
            for (i, &t) in batch.targets().iter().enumerate() {
                train_total -= cache.log_prob(i, t).as_f64();
            }
            let grads = model.backward(&cache, batch.targets())?;
            update(&mut model, &grads, &mut state, lr, config.momentum).map_err(|e| match e {
                Error::Diverged => Error::TrainingDiverged {
                    epoch,
                    iteration: iteration + 1,
                },
                other => other,
            })?;
        }
        let train_cost = train_total / train.len() as f64;
        let valid_cost = mean_cost(&model, valid);
        if !valid_cost.is_finite() || !train_cost.is_finite() {
            return Err(Error::TrainingDiverged {
                epoch,
                iteration: order.len().div_ceil(config.batch_size),
            });
        }
        history.epochs.push(EpochRecord {
            epoch,
            train_cost,
            valid_cost,
            learning_rate: lr,
        });
        log::debug!("epoch {epoch}: train {train_cost:.4} valid {valid_cost:.4} lr {lr:.4}");
        if valid_cost > prev_valid {
            history.stopped_early = true;
            return Ok((best, history));
        }
        prev_valid = valid_cost;
        best = model.clone();
        history.best_epoch = epoch;
    }
    Ok((best, history))
}
