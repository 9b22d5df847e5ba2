//! Deterministic synthetic corpora for tests, demos and desk-scale runs.
//!
//! - [`author_corpora`]: English-looking text by several "authors" sharing a
//!   lexicon and a set of function words but differing in word preferences
//!   and in a private inventory of recurring multi-word phrases.
//! - [`grammar_sentences`]: index sentences in which every word from the
//!   fourth on is a fixed function of the three before it.
//! - [`unigram_sentences`]: i.i.d. draws from a given distribution.

use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::RawDocument;
use crate::error::{Error, Result};

const FUNCTION_WORDS: [&str; 40] = [
    "the", "of", "and", "to", "a", "in", "that", "is", "was", "he", "for", "it", "with", "as",
    "his", "on", "be", "at", "by", "had", "not", "but", "from", "or", "have", "an", "they",
    "which", "one", "you", "were", "her", "all", "she", "there", "would", "their", "we", "him",
    "been",
];

const ONSETS: [&str; 18] = [
    "b", "c", "d", "f", "g", "h", "l", "m", "n", "p", "r", "s", "t", "v", "br", "st", "tr", "pl",
];
const NUCLEI: [&str; 6] = ["a", "e", "i", "o", "u", "ou"];
const CODAS: [&str; 8] = ["", "", "n", "r", "s", "l", "m", "nt"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_authors: usize,
    pub sentences_per_author: usize,
    /// Shared pool of content words.
    pub lexicon_size: usize,
    /// Content words each author draws from.
    pub author_words: usize,
    pub phrases_per_author: usize,
    /// Zipf exponent of word and phrase frequencies.
    pub zipf: f64,
    /// Probability that the next unit of a sentence is a function word.
    pub function_word_rate: f64,
    /// Probability that it is a single content word rather than a phrase.
    pub free_word_rate: f64,
    pub min_sentence_len: usize,
    pub max_sentence_len: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_authors: 6,
            sentences_per_author: 3000,
            lexicon_size: 6000,
            author_words: 2500,
            phrases_per_author: 1200,
            zipf: 1.0,
            function_word_rate: 0.3,
            free_word_rate: 0.35,
            min_sentence_len: 6,
            max_sentence_len: 22,
            seed: 7,
        }
    }
}

pub fn author_id(i: usize) -> String {
    format!("author{:02}", i + 1)
}

fn zipf_weights(n: usize, s: f64) -> Vec<f64> {
    (1..=n).map(|r| (r as f64).powf(-s)).collect()
}

/// Distinct pronounceable pseudo-words, in generation order.
pub fn lexicon(size: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reserved: HashSet<&str> = FUNCTION_WORDS.into_iter().collect();
    let mut seen = HashSet::with_capacity(size);
    let mut out = Vec::with_capacity(size);
    while out.len() < size {
        let syllables = rng.random_range(2..=3);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push_str(ONSETS[rng.random_range(0..ONSETS.len())]);
            w.push_str(NUCLEI[rng.random_range(0..NUCLEI.len())]);
        }
        w.push_str(CODAS[rng.random_range(0..CODAS.len())]);
        if !reserved.contains(w.as_str()) && seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

fn validate(cfg: &SynthConfig) -> Result<()> {
    let bad = |field, reason: &str| {
        Err(Error::InvalidConfig {
            field,
            reason: reason.into(),
        })
    };
    if cfg.n_authors == 0 {
        return bad("n_authors", "must be positive");
    }
    if cfg.author_words == 0 || cfg.author_words > cfg.lexicon_size {
        return bad("author_words", "must be in 1..=lexicon_size");
    }
    if cfg.phrases_per_author == 0 {
        return bad("phrases_per_author", "must be positive");
    }
    if cfg.min_sentence_len == 0 || cfg.min_sentence_len > cfg.max_sentence_len {
        return bad("min_sentence_len", "must be in 1..=max_sentence_len");
    }
    if !(0.0..1.0).contains(&cfg.function_word_rate) {
        return bad("function_word_rate", "must be in [0, 1)");
    }
    if !(0.0..=1.0).contains(&cfg.free_word_rate) {
        return bad("free_word_rate", "must be in [0, 1]");
    }
    Ok(())
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// One document per author, sentences separated by single spaces.
pub fn author_corpora(cfg: &SynthConfig) -> Result<Vec<RawDocument>> {
    validate(cfg)?;
    let lex = lexicon(cfg.lexicon_size, cfg.seed);
    let function_dist = WeightedIndex::new(zipf_weights(FUNCTION_WORDS.len(), 1.0)).expect("positive weights");
    let word_dist = WeightedIndex::new(zipf_weights(cfg.author_words, cfg.zipf)).expect("positive weights");
    let phrase_dist = WeightedIndex::new(zipf_weights(cfg.phrases_per_author, cfg.zipf)).expect("positive weights");

    (0..cfg.n_authors)
        .map(|a| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(a as u64 + 1);
            let mut ranked: Vec<&str> = lex.iter().map(String::as_str).collect();
            ranked.shuffle(&mut rng);
            ranked.truncate(cfg.author_words);
            let phrases: Vec<Vec<&str>> = (0..cfg.phrases_per_author)
                .map(|_| {
                    let len = rng.random_range(2..=5);
                    (0..len).map(|_| ranked[word_dist.sample(&mut rng)]).collect()
                })
                .collect();

            let mut text = String::new();
            for _ in 0..cfg.sentences_per_author {
                let target = rng.random_range(cfg.min_sentence_len..=cfg.max_sentence_len);
                let mut words: Vec<&str> = Vec::with_capacity(target + 5);
                while words.len() < target {
                    if rng.random_bool(cfg.function_word_rate) {
                        words.push(FUNCTION_WORDS[function_dist.sample(&mut rng)]);
                    } else if rng.random_bool(cfg.free_word_rate) {
                        words.push(ranked[word_dist.sample(&mut rng)]);
                    } else {
                        words.extend(&phrases[phrase_dist.sample(&mut rng)]);
                    }
                }
                let end = match rng.random_range(0..10) {
                    0 => '?',
                    1 => '!',
                    _ => '.',
                };
                if !text.is_empty() {
                    text.push(' ');
                }
                text.push_str(&capitalize(&words.join(" ")));
                text.push(end);
            }
            RawDocument::new(author_id(a), text)
        })
        .collect()
}

/// The deterministic successor rule of [`grammar_sentences`].
pub fn grammar_next(vocab_size: usize, a: usize, b: usize, c: usize) -> usize {
    (3 * a + 5 * b + 7 * c + 1) % vocab_size
}

/// Sentences over `0..vocab_size` that start with one of `n_starts` fixed
/// random triples and continue by [`grammar_next`]. Every word after the
/// third is fully determined by the three preceding it.
pub fn grammar_sentences(
    vocab_size: usize,
    n_sentences: usize,
    len: usize,
    n_starts: usize,
    seed: u64,
) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<[usize; 3]> = (0..n_starts.max(1))
        .map(|_| std::array::from_fn(|_| rng.random_range(0..vocab_size)))
        .collect();
    (0..n_sentences)
        .map(|_| {
            let mut s = starts[rng.random_range(0..starts.len())].to_vec();
            while s.len() < len {
                let k = s.len();
                s.push(grammar_next(vocab_size, s[k - 3], s[k - 2], s[k - 1]));
            }
            s.truncate(len);
            s
        })
        .collect()
}

/// `n_sentences` sentences of `len` i.i.d. draws from `dist`.
pub fn unigram_sentences(dist: &[f64], n_sentences: usize, len: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let d = WeightedIndex::new(dist).map_err(|e| Error::Invalid(format!("distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n_sentences)
        .map(|_| (0..len).map(|_| d.sample(&mut rng)).collect())
        .collect())
}

/// Splits a document's sentences alternately into two pseudo-authors.
pub fn split_author(text: &str, first: &str, second: &str) -> Result<(RawDocument, RawDocument)> {
    let sentences = crate::corpus::segment_sentences(text);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, s) in sentences.into_iter().enumerate() {
        if i % 2 == 0 { a.push(s) } else { b.push(s) }
    }
    Ok((RawDocument::new(first, a.join(" "))?, RawDocument::new(second, b.join(" "))?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SynthConfig {
        SynthConfig {
            n_authors: 2,
            sentences_per_author: 50,
            lexicon_size: 300,
            author_words: 100,
            phrases_per_author: 40,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(author_corpora(&small()).unwrap(), author_corpora(&small()).unwrap());
        let other = SynthConfig { seed: 8, ..small() };
        assert_ne!(author_corpora(&small()).unwrap(), author_corpora(&other).unwrap());
    }

    #[test]
    fn sentence_count_survives_segmentation() {
        for doc in author_corpora(&small()).unwrap() {
            assert_eq!(crate::corpus::segment_sentences(&doc.text).len(), 50);
        }
    }

    #[test]
    fn grammar_is_deterministic_after_three() {
        for s in grammar_sentences(17, 30, 12, 5, 3) {
            assert_eq!(s.len(), 12);
            for k in 3..s.len() {
                assert_eq!(s[k], grammar_next(17, s[k - 3], s[k - 2], s[k - 1]));
            }
        }
    }

    #[test]
    fn unigram_draws_stay_in_support() {
        let s = unigram_sentences(&[0.0, 1.0, 3.0], 20, 5, 1).unwrap();
        assert!(s.iter().flatten().all(|&w| w == 1 || w == 2));
    }

    #[test]
    fn split_alternates() {
        let (a, b) = split_author("One. Two. Three.", "x", "y").unwrap();
        assert_eq!(a.text, "One. Three.");
        assert_eq!(b.text, "Two.");
    }
}
