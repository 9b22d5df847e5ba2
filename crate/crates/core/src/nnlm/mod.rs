//! Feedforward neural network language model.
//!
//! The `N - 1` context words are looked up in a shared embedding table and
//! concatenated, passed through one logistic hidden layer and a softmax over
//! the vocabulary:
//!
//! ```text
//! y_emb = [E[w_1]; ...; E[w_{N-1}]]
//! z_hid = W_emb_hidᵀ y_emb + b_hid,   y_hid = logistic(z_hid)
//! z_out = W_hid_outᵀ y_hid + b_out,   y_out = softmax(z_out)
//! ```
//!
//! Training minimizes the mean cross-entropy of a mini-batch with momentum
//! SGD (see [`train`]).

mod propagate;
mod train;

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::corpus::ContextSet;
use crate::error::{Error, Result};
use crate::lm::{LanguageModel, SentenceScore};
use crate::scalar::Scalar;

pub use propagate::{cross_entropy, update, ForwardCache, OptimizerState};
pub use train::{learning_rate_at, mean_cost, train, train_pairs, EpochRecord, TrainHistory};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnlmConfig {
    /// Vocabulary size V, including the OOV entry.
    pub vocab_size: usize,
    /// Words per window N, target included.
    pub context_size: usize,
    /// 1-based position of the predicted word inside the window.
    pub target_pos: usize,
    pub emb_dim: usize,
    pub hidden_dim: usize,
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    /// First epoch (1-based) at which the learning rate is multiplied by `decay_factor`.
    pub decay_start_epoch: usize,
    pub decay_factor: f64,
    pub init_seed: u64,
    #[serde(default = "default_init_std")]
    pub init_std: f64,
}

fn default_init_std() -> f64 {
    0.01
}

impl Default for NnlmConfig {
    fn default() -> Self {
        Self {
            vocab_size: 0,
            context_size: 4,
            target_pos: 4,
            emb_dim: 50,
            hidden_dim: 200,
            batch_size: 100,
            epochs: 15,
            learning_rate: 0.1,
            momentum: 0.9,
            decay_start_epoch: 10,
            decay_factor: 0.9,
            init_seed: 1,
            init_std: default_init_std(),
        }
    }
}

impl NnlmConfig {
    pub fn validate(&self) -> Result<()> {
        fn bad(field: &'static str, reason: String) -> Result<()> {
            Err(Error::InvalidConfig { field, reason })
        }
        if self.vocab_size < 2 {
            return bad("vocab_size", format!("must be at least 2, got {}", self.vocab_size));
        }
        if self.context_size < 2 {
            return bad("context_size", format!("must be at least 2, got {}", self.context_size));
        }
        if !(1..=self.context_size).contains(&self.target_pos) {
            return bad(
                "target_pos",
                format!("must be in 1..={}, got {}", self.context_size, self.target_pos),
            );
        }
        for (field, v) in [
            ("emb_dim", self.emb_dim),
            ("hidden_dim", self.hidden_dim),
            ("batch_size", self.batch_size),
        ] {
            if v < 1 {
                return bad(field, "must be at least 1".into());
            }
        }
        if !(self.momentum >= 0.0 && self.momentum < 1.0) {
            return bad("momentum", format!("must be in [0, 1), got {}", self.momentum));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate", format!("must be positive, got {}", self.learning_rate));
        }
        if !(self.decay_factor > 0.0 && self.decay_factor <= 1.0) {
            return bad("decay_factor", format!("must be in (0, 1], got {}", self.decay_factor));
        }
        if !(self.init_std >= 0.0 && self.init_std.is_finite()) {
            return bad("init_std", format!("must be non-negative, got {}", self.init_std));
        }
        Ok(())
    }

    pub fn context_width(&self) -> usize {
        self.context_size - 1
    }
}

/// The five parameter tensors. Also used for gradients and momentum buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct Params<F> {
    /// V × N_emb
    pub word_emb: Array2<F>,
    /// (N-1)·N_emb × N_hid
    pub emb_hid: Array2<F>,
    pub hid_bias: Array1<F>,
    /// N_hid × V
    pub hid_out: Array2<F>,
    pub out_bias: Array1<F>,
}

pub type Gradients<F> = Params<F>;

pub const TENSOR_NAMES: [&str; 5] = ["word_emb", "emb_hid", "hid_bias", "hid_out", "out_bias"];

impl<F: Scalar> Params<F> {
    pub fn zeros(config: &NnlmConfig) -> Self {
        let (v, e, h, w) = (
            config.vocab_size,
            config.emb_dim,
            config.hidden_dim,
            config.context_width(),
        );
        Self {
            word_emb: Array2::zeros((v, e)),
            emb_hid: Array2::zeros((w * e, h)),
            hid_bias: Array1::zeros(h),
            hid_out: Array2::zeros((h, v)),
            out_bias: Array1::zeros(v),
        }
    }

    pub fn shapes(&self) -> [Vec<usize>; 5] {
        [
            self.word_emb.shape().to_vec(),
            self.emb_hid.shape().to_vec(),
            self.hid_bias.shape().to_vec(),
            self.hid_out.shape().to_vec(),
            self.out_bias.shape().to_vec(),
        ]
    }

    /// Row-major views of the five tensors, in [`TENSOR_NAMES`] order.
    pub fn tensors(&self) -> [&[F]; 5] {
        [
            self.word_emb.as_slice().expect("standard layout"),
            self.emb_hid.as_slice().expect("standard layout"),
            self.hid_bias.as_slice().expect("standard layout"),
            self.hid_out.as_slice().expect("standard layout"),
            self.out_bias.as_slice().expect("standard layout"),
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [F]; 5] {
        [
            self.word_emb.as_slice_mut().expect("standard layout"),
            self.emb_hid.as_slice_mut().expect("standard layout"),
            self.hid_bias.as_slice_mut().expect("standard layout"),
            self.hid_out.as_slice_mut().expect("standard layout"),
            self.out_bias.as_slice_mut().expect("standard layout"),
        ]
    }

    pub fn all_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }

    pub fn max_abs(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|t| t.iter())
            .fold(0.0, |m, x| m.max(x.abs().as_f64()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NnlmModel<F> {
    pub config: NnlmConfig,
    pub params: Params<F>,
}

/// Weights drawn from N(0, init_std²) in tensor order, biases zero.
pub fn init_model<F: Scalar>(config: &NnlmConfig) -> Result<NnlmModel<F>> {
    config.validate()?;
    let mut params = Params::zeros(config);
    let mut rng = ChaCha8Rng::seed_from_u64(config.init_seed);
    let normal = Normal::new(0.0, config.init_std).map_err(|e| Error::InvalidConfig {
        field: "init_std",
        reason: e.to_string(),
    })?;
    for w in [
        params.word_emb.iter_mut(),
        params.emb_hid.iter_mut(),
        params.hid_out.iter_mut(),
    ] {
        for x in w {
            *x = F::from_f64_lossy(normal.sample(&mut rng));
        }
    }
    Ok(NnlmModel {
        config: config.clone(),
        params,
    })
}

impl<F: Scalar> NnlmModel<F> {
    pub fn vocab_size(&self) -> usize {
        self.config.vocab_size
    }

    pub fn check_shapes(&self) -> Result<()> {
        let want = Params::<F>::zeros(&self.config).shapes();
        let got = self.params.shapes();
        for ((name, w), g) in TENSOR_NAMES.iter().zip(&want).zip(&got) {
            if w != g {
                return Err(Error::ShapeMismatch(format!("{name}: expected {w:?}, got {g:?}")));
            }
        }
        Ok(())
    }

    /// Windows of the sentence with a full `N - 1` word history, as a batch.
    fn sentence_windows(&self, sentence: &[usize], first: usize) -> Result<ContextSet> {
        let n = self.config.context_size;
        let v = self.vocab_size();
        if let Some(&bad) = sentence.iter().find(|&&i| i >= v) {
            return Err(Error::IndexOutOfRange { index: bad, vocab: v });
        }
        let mut set = ContextSet::new(n - 1);
        for window in sentence.windows(n).skip(first.saturating_sub(n - 1)) {
            set.push(&window[..n - 1], window[n - 1]);
        }
        Ok(set)
    }

    /// Σ log10 P(w_k | w_{k-N+1..k-1}) over k = N..len. Requires a model
    /// trained for next-word prediction (`target_pos == context_size`).
    pub fn sentence_log10prob(&self, sentence: &[usize]) -> Result<SentenceScore> {
        self.sentence_log10prob_from(sentence, 0)
    }

    /// Scores the positions from `first` (0-based) on that have a full context.
    pub fn sentence_log10prob_from(&self, sentence: &[usize], first: usize) -> Result<SentenceScore> {
        if self.config.target_pos != self.config.context_size {
            return Err(Error::InvalidConfig {
                field: "target_pos",
                reason: "sentence scoring needs target_pos == context_size".into(),
            });
        }
        let windows = self.sentence_windows(sentence, first)?;
        if windows.is_empty() {
            return Ok(SentenceScore::ZERO);
        }
        let cache = self.forward(&windows)?;
        let sum_log10 = (0..windows.len())
            .map(|i| cache.log_prob(i, windows.target(i)).as_f64())
            .sum::<f64>()
            / std::f64::consts::LN_10;
        Ok(SentenceScore {
            sum_log10,
            n_scored: windows.len(),
        })
    }
}

impl<F: Scalar> LanguageModel for NnlmModel<F> {
    fn vocab_size(&self) -> usize {
        self.config.vocab_size
    }

    fn context_size(&self) -> usize {
        self.config.context_size
    }

    fn sentence_log10prob_from(&self, sentence: &[usize], first: usize) -> Result<SentenceScore> {
        NnlmModel::sentence_log10prob_from(self, sentence, first)
    }
}

#[derive(Serialize, Deserialize)]
struct TensorFile<F> {
    shape: Vec<usize>,
    data: Vec<F>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile<F> {
    format_version: u32,
    scalar: String,
    config: NnlmConfig,
    word_emb: TensorFile<F>,
    emb_hid: TensorFile<F>,
    hid_bias: TensorFile<F>,
    hid_out: TensorFile<F>,
    out_bias: TensorFile<F>,
}

fn tensor2<F: Scalar>(name: &str, t: TensorFile<F>) -> Result<Array2<F>> {
    match t.shape[..] {
        [r, c] => Array2::from_shape_vec((r, c), t.data)
            .map_err(|e| Error::Format(format!("{name}: {e}"))),
        _ => Err(Error::Format(format!("{name}: expected 2-d shape, got {:?}", t.shape))),
    }
}

fn tensor1<F: Scalar>(name: &str, t: TensorFile<F>) -> Result<Array1<F>> {
    match t.shape[..] {
        [n] if n == t.data.len() => Ok(Array1::from_vec(t.data)),
        _ => Err(Error::Format(format!("{name}: bad 1-d shape {:?}", t.shape))),
    }
}

impl<F: Scalar> NnlmModel<F> {
    /// JSON container: config plus the five tensors in row-major order.
    pub fn to_json(&self) -> Result<String> {
        let file = |a: &[F], shape: &[usize]| TensorFile {
            shape: shape.to_vec(),
            data: a.to_vec(),
        };
        let p = &self.params;
        let t = p.tensors();
        let out = ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            scalar: F::NAME.to_owned(),
            config: self.config.clone(),
            word_emb: file(t[0], p.word_emb.shape()),
            emb_hid: file(t[1], p.emb_hid.shape()),
            hid_bias: file(t[2], p.hid_bias.shape()),
            hid_out: file(t[3], p.hid_out.shape()),
            out_bias: file(t[4], p.out_bias.shape()),
        };
        Ok(serde_json::to_string(&out)?)
    }

    /// Parses and validates a container written by [`NnlmModel::to_json`].
    pub fn from_json(s: &str) -> Result<Self> {
        let f: ModelFile<F> = serde_json::from_str(s)?;
        if f.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {}", f.format_version)));
        }
        if f.scalar != F::NAME {
            return Err(Error::Format(format!(
                "model stored as {}, loading as {}",
                f.scalar,
                F::NAME
            )));
        }
        f.config.validate()?;
        let model = NnlmModel {
            config: f.config,
            params: Params {
                word_emb: tensor2("word_emb", f.word_emb)?,
                emb_hid: tensor2("emb_hid", f.emb_hid)?,
                hid_bias: tensor1("hid_bias", f.hid_bias)?,
                hid_out: tensor2("hid_out", f.hid_out)?,
                out_bias: tensor1("out_bias", f.out_bias)?,
            },
        };
        model.check_shapes()?;
        if !model.params.all_finite() {
            return Err(Error::NonFinite("model parameters"));
        }
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(v: usize) -> NnlmConfig {
        NnlmConfig {
            vocab_size: v,
            context_size: 4,
            target_pos: 4,
            emb_dim: 2,
            hidden_dim: 3,
            ..NnlmConfig::default()
        }
    }

    #[test]
    fn init_is_deterministic() {
        let a: NnlmModel<f64> = init_model(&tiny(7)).unwrap();
        let b: NnlmModel<f64> = init_model(&tiny(7)).unwrap();
        assert_eq!(a, b);
        let mut other = tiny(7);
        other.init_seed = 2;
        assert_ne!(a, init_model::<f64>(&other).unwrap());
    }

    #[test]
    fn init_shapes() {
        let m: NnlmModel<f64> = init_model(&tiny(3)).unwrap();
        assert_eq!(m.params.word_emb.shape(), &[3, 2]);
        assert_eq!(m.params.emb_hid.shape(), &[6, 3]);
        assert_eq!(m.params.hid_bias.shape(), &[3]);
        assert_eq!(m.params.hid_out.shape(), &[3, 3]);
        assert_eq!(m.params.out_bias.shape(), &[3]);
        assert!(m.params.hid_bias.iter().all(|&b| b == 0.0));
        assert!(m.params.out_bias.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn init_mean_within_three_standard_errors() {
        let cfg = NnlmConfig {
            vocab_size: 200,
            emb_dim: 100,
            ..tiny(200)
        };
        let m: NnlmModel<f64> = init_model(&cfg).unwrap();
        let n = m.params.word_emb.len() as f64;
        assert_eq!(n, 20_000.0);
        let mean = m.params.word_emb.sum() / n;
        let se = 0.01 / n.sqrt();
        assert!(mean.abs() < 3.0 * se, "mean {mean} vs 3se {}", 3.0 * se);
        let var = m.params.word_emb.mapv(|x| (x - mean).powi(2)).sum() / (n - 1.0);
        assert!((var.sqrt() - 0.01).abs() < 0.0005);
    }

    #[test]
    fn invalid_configs_name_the_field() {
        let cases: Vec<(NnlmConfig, &str)> = vec![
            (NnlmConfig { context_size: 1, target_pos: 1, ..tiny(5) }, "context_size"),
            (NnlmConfig { target_pos: 5, ..tiny(5) }, "target_pos"),
            (NnlmConfig { target_pos: 0, ..tiny(5) }, "target_pos"),
            (NnlmConfig { emb_dim: 0, ..tiny(5) }, "emb_dim"),
            (NnlmConfig { hidden_dim: 0, ..tiny(5) }, "hidden_dim"),
            (NnlmConfig { batch_size: 0, ..tiny(5) }, "batch_size"),
            (NnlmConfig { momentum: 1.0, ..tiny(5) }, "momentum"),
            (NnlmConfig { learning_rate: 0.0, ..tiny(5) }, "learning_rate"),
            (NnlmConfig { decay_factor: 0.0, ..tiny(5) }, "decay_factor"),
            (NnlmConfig { decay_factor: 1.5, ..tiny(5) }, "decay_factor"),
            (tiny(1), "vocab_size"),
        ];
        for (cfg, field) in cases {
            match init_model::<f64>(&cfg) {
                Err(Error::InvalidConfig { field: f, .. }) => assert_eq!(f, field),
                other => panic!("expected InvalidConfig({field}), got {other:?}"),
            }
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let m: NnlmModel<f64> = init_model(&tiny(6)).unwrap();
        let s = m.to_json().unwrap();
        let back = NnlmModel::<f64>::from_json(&s).unwrap();
        assert_eq!(back, m);
        assert!(NnlmModel::<f32>::from_json(&s).is_err());

        let m32: NnlmModel<f32> = init_model(&tiny(6)).unwrap();
        assert_eq!(NnlmModel::<f32>::from_json(&m32.to_json().unwrap()).unwrap(), m32);

        let mut bad: serde_json::Value = serde_json::from_str(&s).unwrap();
        bad["config"]["hidden_dim"] = 4.into();
        assert!(matches!(
            NnlmModel::<f64>::from_json(&bad.to_string()),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn scoring_requires_next_word_model() {
        let cfg = NnlmConfig { target_pos: 2, ..tiny(5) };
        let m: NnlmModel<f64> = init_model(&cfg).unwrap();
        assert!(m.sentence_log10prob(&[0, 1, 2, 3]).is_err());
    }
}
