use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Log10 probability mass of one sentence and the number of positions scored.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SentenceScore {
    pub sum_log10: f64,
    pub n_scored: usize,
}

impl SentenceScore {
    pub const ZERO: SentenceScore = SentenceScore {
        sum_log10: 0.0,
        n_scored: 0,
    };
}

impl std::ops::Add for SentenceScore {
    type Output = SentenceScore;
    fn add(self, rhs: Self) -> Self {
        SentenceScore {
            sum_log10: self.sum_log10 + rhs.sum_log10,
            n_scored: self.n_scored + rhs.n_scored,
        }
    }
}

impl std::ops::AddAssign for SentenceScore {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for SentenceScore {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

/// A model that scores index-encoded sentences over its own vocabulary.
///
/// Only positions with a full in-sentence context are scored (no sentence
/// boundary tokens), so models of the same context size always score the same
/// number of events on a given sentence.
pub trait LanguageModel: Send + Sync {
    fn vocab_size(&self) -> usize;

    /// Number of words (including the predicted one) in each scored window.
    fn context_size(&self) -> usize;

    fn sentence_log10prob(&self, sentence: &[usize]) -> Result<SentenceScore> {
        self.sentence_log10prob_from(sentence, 0)
    }

    /// Like [`LanguageModel::sentence_log10prob`] but skips positions before
    /// `first` (0-based). Models of different context sizes score identical
    /// events when given the same `first` ≥ the larger context size − 1.
    fn sentence_log10prob_from(&self, sentence: &[usize], first: usize) -> Result<SentenceScore>;
}
