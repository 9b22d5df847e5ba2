//! Authorship attribution with per-author language models.
//!
//! Each candidate author gets its own language model trained on that author's
//! text. A test passage is attributed to the author whose model assigns it the
//! lowest perplexity. Two model families are provided:
//!
//! - [`nnlm`]: a feedforward neural network language model (shared word
//!   embedding table, one logistic hidden layer, softmax output) trained with
//!   hand-written backpropagation and momentum SGD.
//! - [`ngram`]: a back-off Kneser-Ney N-gram model of order 1 to 4.
//!
//! Supporting modules cover text preparation ([`corpus`], [`porter`]),
//! evaluation ([`eval`]) and the coarse-to-fine hyperparameter search
//! ([`hypersearch`]).
//!
//! The neural model is generic over its floating point type through
//! [`Scalar`]; [`Nnlm`] and [`Nnlm32`] are the two concrete instantiations.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod hypersearch;
pub mod lm;
pub mod ngram;
pub mod nnlm;
pub mod porter;
pub mod scalar;
pub mod synth;

pub use error::{Error, Result};
pub use lm::{LanguageModel, SentenceScore};
pub use scalar::Scalar;

/// Double precision neural language model. Used for training and gradient checks.
pub type Nnlm = nnlm::NnlmModel<f64>;
/// Single precision neural language model.
pub type Nnlm32 = nnlm::NnlmModel<f32>;
/// Double precision gradients / optimizer buffers.
pub type Gradients = nnlm::Gradients<f64>;
/// Double precision forward cache.
pub type ForwardCache = nnlm::ForwardCache<f64>;
