//! Back-off Kneser-Ney N-gram models, orders 1 through 4.
//!
//! The highest order is estimated from raw counts, lower orders from
//! continuation counts (number of distinct left neighbours, with the sentence
//! start counted as one neighbour). Each order uses a single absolute discount
//! `D = n1 / (n1 + 2 n2)`. Seen events keep their discounted relative
//! frequency; unseen ones back off to the next shorter context scaled by a
//! per-context weight that makes the distribution sum to one. The unigram
//! level is undiscounted and mixed with a uniform distribution at weight
//! [`UNIFORM_FLOOR`], so every vocabulary word has positive probability.
//!
//! No sentence boundary tokens are inserted: windows never cross a sentence
//! boundary and the first words of a sentence are only scored in
//! [`ScoringMode::Full`].

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lm::{LanguageModel, SentenceScore};

pub const MAX_ORDER: usize = 4;
/// Weight of the uniform distribution in the unigram level.
pub const UNIFORM_FLOOR: f64 = 1e-6;
/// Discount used when an order has no singletons or no doubletons.
pub const FALLBACK_DISCOUNT: f64 = 0.5;

pub const NGRAM_FORMAT_VERSION: u32 = 1;

type Key = Box<[u32]>;

fn key(tokens: &[usize]) -> Key {
    tokens.iter().map(|&t| t as u32).collect()
}

/// Raw and continuation count tables.
#[derive(Debug, Clone)]
pub struct NgramCounts {
    pub order: usize,
    pub vocab_size: usize,
    /// `raw[k - 1]` maps each k-gram to its count.
    raw: Vec<IndexMap<Key, u64>>,
    /// `continuation[k - 1]` maps each k-gram (k < order) to its number of
    /// distinct left contexts.
    continuation: Vec<IndexMap<Key, u64>>,
}

pub fn count_ngrams<'a, I>(sentences: I, order: usize, vocab_size: usize) -> Result<NgramCounts>
where
    I: IntoIterator<Item = &'a [usize]>,
{
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(Error::InvalidConfig {
            field: "order",
            reason: format!("must be in 1..={MAX_ORDER}, got {order}"),
        });
    }
    if vocab_size == 0 {
        return Err(Error::InvalidConfig {
            field: "vocab_size",
            reason: "must be positive".into(),
        });
    }
    let mut raw: Vec<IndexMap<Key, u64>> = vec![IndexMap::new(); order];
    // k-grams seen at the start of a sentence, for k < order
    let mut initial: Vec<HashSet<Key>> = vec![HashSet::new(); order.saturating_sub(1)];
    let mut tokens = 0usize;
    for sentence in sentences {
        if let Some(&bad) = sentence.iter().find(|&&w| w >= vocab_size) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                vocab: vocab_size,
            });
        }
        tokens += sentence.len();
        for k in 1..=order {
            for window in sentence.windows(k) {
                *raw[k - 1].entry(key(window)).or_default() += 1;
            }
            if k < order && sentence.len() >= k {
                initial[k - 1].insert(key(&sentence[..k]));
            }
        }
    }
    if tokens == 0 {
        return Err(Error::Empty("training split"));
    }

    let mut continuation: Vec<IndexMap<Key, u64>> = vec![IndexMap::new(); order.saturating_sub(1)];
    for k in 1..order {
        let cont = &mut continuation[k - 1];
        // every distinct (k+1)-gram is one distinct left neighbour of its suffix
        for longer in raw[k].keys() {
            *cont.entry(longer[1..].into()).or_default() += 1;
        }
        for g in raw[k - 1].keys() {
            if initial[k - 1].contains(g) {
                *cont.entry(g.clone()).or_default() += 1;
            }
        }
    }
    Ok(NgramCounts {
        order,
        vocab_size,
        raw,
        continuation,
    })
}

impl NgramCounts {
    pub fn count(&self, gram: &[usize]) -> u64 {
        match gram.len() {
            0 => 0,
            k if k <= self.order => self.raw[k - 1].get(&key(gram)).copied().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn continuation_count(&self, gram: &[usize]) -> u64 {
        match gram.len() {
            0 => 0,
            k if k < self.order => self.continuation[k - 1]
                .get(&key(gram))
                .copied()
                .unwrap_or(0),
            _ => 0,
        }
    }

    /// Counts the model estimates order `k` from: raw at the top order,
    /// continuation counts below it.
    fn estimation_table(&self, k: usize) -> &IndexMap<Key, u64> {
        if k == self.order {
            &self.raw[k - 1]
        } else {
            &self.continuation[k - 1]
        }
    }

    /// Σ_w c(ctx, w) over the raw table of order `ctx.len() + 1`.
    pub fn history_count(&self, ctx: &[usize]) -> u64 {
        let k = ctx.len() + 1;
        if k > self.order {
            return 0;
        }
        let ctx = key(ctx);
        self.raw[k - 1]
            .iter()
            .filter(|(g, _)| g[..k - 1] == ctx[..])
            .map(|(_, &c)| c)
            .sum()
    }

    pub fn num_grams(&self, k: usize) -> usize {
        self.raw.get(k.wrapping_sub(1)).map_or(0, IndexMap::len)
    }
}

/// Discount from counts-of-counts: n1 / (n1 + 2 n2).
pub fn discount_from_counts<'a, I: IntoIterator<Item = &'a u64>>(counts: I) -> f64 {
    let (mut n1, mut n2) = (0u64, 0u64);
    for &c in counts {
        match c {
            1 => n1 += 1,
            2 => n2 += 1,
            _ => {}
        }
    }
    if n1 == 0 || n2 == 0 {
        FALLBACK_DISCOUNT
    } else {
        n1 as f64 / (n1 + 2 * n2) as f64
    }
}

/// Discounted probabilities of the words seen after one context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextEntry {
    pub bow: f64,
    /// Sorted ascending.
    pub words: Vec<u32>,
    pub probs: Vec<f64>,
}

impl ContextEntry {
    fn lookup(&self, w: u32) -> Option<f64> {
        self.words.binary_search(&w).ok().map(|i| self.probs[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoringMode {
    /// Only positions with a full `order - 1` word history.
    Comparison,
    /// Every position; early words use the truncated history.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NgramScore {
    pub score: SentenceScore,
    pub mode: ScoringMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NgramModel {
    order: usize,
    vocab_size: usize,
    /// `discounts[k - 1]` for order k; the unigram entry is 0.
    discounts: Vec<f64>,
    unigram: Vec<f64>,
    /// `levels[k - 2]`: context of k-1 tokens → entry, for k in 2..=order.
    levels: Vec<HashMap<Key, ContextEntry>>,
}

pub fn estimate_kneser_ney(counts: &NgramCounts) -> NgramModel {
    let order = counts.order;
    let v = counts.vocab_size;

    let mut discounts = vec![0.0; order];
    for (k, d) in discounts.iter_mut().enumerate().skip(1) {
        *d = discount_from_counts(counts.estimation_table(k + 1).values());
    }

    let uni_table = counts.estimation_table(1);
    let uni_total: u64 = uni_table.values().sum();
    let uniform = UNIFORM_FLOOR / v as f64;
    let mut unigram = vec![uniform; v];
    for (g, &c) in uni_table {
        unigram[g[0] as usize] += (1.0 - UNIFORM_FLOOR) * c as f64 / uni_total as f64;
    }

    let mut model = NgramModel {
        order,
        vocab_size: v,
        discounts,
        unigram,
        levels: Vec::with_capacity(order.saturating_sub(1)),
    };

    for k in 2..=order {
        let d = model.discounts[k - 1];
        let mut grouped: IndexMap<Key, Vec<(u32, u64)>> = IndexMap::new();
        for (g, &c) in counts.estimation_table(k) {
            grouped
                .entry(g[..k - 1].into())
                .or_default()
                .push((g[k - 1], c));
        }
        let mut level = HashMap::with_capacity(grouped.len());
        for (ctx, mut seen) in grouped {
            seen.sort_unstable_by_key(|&(w, _)| w);
            let total: u64 = seen.iter().map(|&(_, c)| c).sum();
            let words: Vec<u32> = seen.iter().map(|&(w, _)| w).collect();
            let entry = if seen.len() == v {
                // nothing left to back off to: keep the relative frequencies
                ContextEntry {
                    bow: 1.0,
                    probs: seen.iter().map(|&(_, c)| c as f64 / total as f64).collect(),
                    words,
                }
            } else {
                let probs: Vec<f64> = seen
                    .iter()
                    .map(|&(_, c)| (c as f64 - d).max(0.0) / total as f64)
                    .collect();
                let seen_mass: f64 = probs.iter().sum();
                let shorter = &ctx[1..];
                let lower_mass: f64 = words.iter().map(|&w| model.prob_key(w, shorter)).sum();
                ContextEntry {
                    bow: (1.0 - seen_mass) / (1.0 - lower_mass),
                    words,
                    probs,
                }
            };
            level.insert(ctx, entry);
        }
        model.levels.push(level);
    }
    model
}

impl NgramModel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn discounts(&self) -> &[f64] {
        &self.discounts
    }

    pub fn unigram(&self) -> &[f64] {
        &self.unigram
    }

    /// Context entry for a history of `ctx.len()` tokens, if it was seen.
    pub fn context(&self, ctx: &[usize]) -> Option<&ContextEntry> {
        if ctx.is_empty() || ctx.len() >= self.order {
            return None;
        }
        self.levels[ctx.len() - 1].get(&key(ctx))
    }

    /// Histories seen at order `k` (k ≥ 2), in unspecified order.
    pub fn contexts(&self, k: usize) -> impl Iterator<Item = (&[u32], &ContextEntry)> {
        self.levels
            .get(k.wrapping_sub(2))
            .into_iter()
            .flat_map(|l| l.iter().map(|(c, e)| (&c[..], e)))
    }

    fn prob_key(&self, w: u32, ctx: &[u32]) -> f64 {
        if ctx.is_empty() {
            return self.unigram[w as usize];
        }
        match self.levels[ctx.len() - 1].get(ctx) {
            Some(entry) => match entry.lookup(w) {
                Some(p) => p,
                None => entry.bow * self.prob_key(w, &ctx[1..]),
            },
            None => self.prob_key(w, &ctx[1..]),
        }
    }

    /// P(word | context). Only the last `order - 1` context tokens are used;
    /// shorter contexts resolve at the matching lower order.
    pub fn prob(&self, word: usize, context: &[usize]) -> f64 {
        debug_assert!(word < self.vocab_size);
        let keep = context.len().min(self.order - 1);
        let ctx = key(&context[context.len() - keep..]);
        self.prob_key(word as u32, &ctx)
    }

    pub fn sentence_log10prob_mode(&self, sentence: &[usize], mode: ScoringMode) -> Result<NgramScore> {
        let first = match mode {
            ScoringMode::Comparison => self.order - 1,
            ScoringMode::Full => 0,
        };
        Ok(NgramScore {
            score: self.score_positions(sentence, first)?,
            mode,
        })
    }

    fn score_positions(&self, sentence: &[usize], first: usize) -> Result<SentenceScore> {
        if let Some(&bad) = sentence.iter().find(|&&w| w >= self.vocab_size) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                vocab: self.vocab_size,
            });
        }
        let mut score = SentenceScore::ZERO;
        for k in first..sentence.len() {
            let start = k.saturating_sub(self.order - 1);
            score.sum_log10 += self.prob(sentence[k], &sentence[start..k]).log10();
            score.n_scored += 1;
        }
        Ok(score)
    }
}

impl LanguageModel for NgramModel {
    fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn context_size(&self) -> usize {
        self.order
    }

    fn sentence_log10prob_from(&self, sentence: &[usize], first: usize) -> Result<SentenceScore> {
        self.score_positions(sentence, first.max(self.order - 1))
    }
}

#[derive(Serialize, Deserialize)]
struct ContextRecord {
    context: Vec<u32>,
    #[serde(flatten)]
    entry: ContextEntry,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    order: usize,
    vocab_size: usize,
    discounts: Vec<f64>,
    unigram: Vec<f64>,
    levels: Vec<Vec<ContextRecord>>,
}

impl NgramModel {
    fn sorted_level(&self, i: usize) -> Vec<(&Key, &ContextEntry)> {
        let mut l: Vec<_> = self.levels[i].iter().collect();
        l.sort_unstable_by(|a, b| a.0.cmp(b.0));
        l
    }

    pub fn to_json(&self) -> Result<String> {
        let levels = (0..self.levels.len())
            .map(|i| {
                self.sorted_level(i)
                    .into_iter()
                    .map(|(c, e)| ContextRecord {
                        context: c.to_vec(),
                        entry: e.clone(),
                    })
                    .collect()
            })
            .collect();
        let file = ModelFile {
            format_version: NGRAM_FORMAT_VERSION,
            order: self.order,
            vocab_size: self.vocab_size,
            discounts: self.discounts.clone(),
            unigram: self.unigram.clone(),
            levels,
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: ModelFile = serde_json::from_str(s)?;
        if f.format_version != NGRAM_FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {}", f.format_version)));
        }
        if !(1..=MAX_ORDER).contains(&f.order)
            || f.levels.len() != f.order - 1
            || f.discounts.len() != f.order
            || f.unigram.len() != f.vocab_size
        {
            return Err(Error::Format("inconsistent n-gram model dimensions".into()));
        }
        if f.unigram.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(Error::Format("unigram probabilities must be positive".into()));
        }
        let mut levels = Vec::with_capacity(f.levels.len());
        for (i, records) in f.levels.into_iter().enumerate() {
            let mut level = HashMap::with_capacity(records.len());
            for r in records {
                let e = r.entry;
                let sorted = e.words.windows(2).all(|w| w[0] < w[1]);
                if r.context.len() != i + 1
                    || e.words.len() != e.probs.len()
                    || !sorted
                    || e.words.iter().chain(&r.context).any(|&w| w as usize >= f.vocab_size)
                    || !(e.bow > 0.0 && e.bow.is_finite())
                {
                    return Err(Error::Format(format!("bad context record {:?}", r.context)));
                }
                level.insert(r.context.into_boxed_slice(), e);
            }
            levels.push(level);
        }
        Ok(NgramModel {
            order: f.order,
            vocab_size: f.vocab_size,
            discounts: f.discounts,
            unigram: f.unigram,
            levels,
        })
    }

    /// ARPA back-off text format. `words` names the vocabulary entries; when
    /// absent, indices are written instead.
    pub fn to_arpa(&self, words: Option<&[String]>) -> String {
        let name = |w: u32| -> String {
            match words {
                Some(ws) => ws[w as usize].clone(),
                None => w.to_string(),
            }
        };
        let bow_of = |gram: &[u32]| -> Option<f64> {
            if gram.len() >= self.order {
                return None;
            }
            self.levels[gram.len() - 1].get(gram).map(|e| e.bow.log10())
        };
        let mut out = String::from("\n\\data\\\n");
        let _ = writeln!(out, "ngram 1={}", self.vocab_size);
        for (i, level) in self.levels.iter().enumerate() {
            let n: usize = level.values().map(|e| e.words.len()).sum();
            let _ = writeln!(out, "ngram {}={n}", i + 2);
        }

        let line = |out: &mut String, logp: f64, gram: &[u32]| {
            let text = gram.iter().map(|&w| name(w)).collect::<Vec<_>>().join(" ");
            match bow_of(gram) {
                Some(b) => {
                    let _ = writeln!(out, "{logp}\t{text}\t{b}");
                }
                None => {
                    let _ = writeln!(out, "{logp}\t{text}");
                }
            }
        };

        out.push_str("\n\\1-grams:\n");
        for (w, &p) in self.unigram.iter().enumerate() {
            line(&mut out, p.log10(), &[w as u32]);
        }
        for i in 0..self.levels.len() {
            let _ = write!(out, "\n\\{}-grams:\n", i + 2);
            for (ctx, e) in self.sorted_level(i) {
                for (&w, &p) in e.words.iter().zip(&e.probs) {
                    let mut gram = ctx.to_vec();
                    gram.push(w);
                    line(&mut out, p.log10(), &gram);
                }
            }
        }
        out.push_str("\n\\end\\\n");
        out
    }
}

/// A back-off model read from ARPA text, scored by the standard ARPA rule.
#[derive(Debug, Clone)]
pub struct ArpaModel {
    pub order: usize,
    /// `grams[k - 1]`: words → (log10 prob, log10 back-off weight).
    grams: Vec<HashMap<Vec<String>, (f64, f64)>>,
}

impl ArpaModel {
    pub fn parse(text: &str) -> Result<Self> {
        let mut declared: Vec<usize> = Vec::new();
        let mut grams: Vec<HashMap<Vec<String>, (f64, f64)>> = Vec::new();
        let mut section: Option<usize> = None;
        let bad = |msg: String| Error::Format(format!("arpa: {msg}"));
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line == "\\data\\" {
                continue;
            }
            if line == "\\end\\" {
                break;
            }
            if let Some(rest) = line.strip_prefix("ngram ") {
                let (k, n) = rest.split_once('=').ok_or_else(|| bad(line.into()))?;
                let k: usize = k.trim().parse().map_err(|_| bad(line.into()))?;
                let n: usize = n.trim().parse().map_err(|_| bad(line.into()))?;
                if k != declared.len() + 1 {
                    return Err(bad(format!("unexpected order {k}")));
                }
                declared.push(n);
                grams.push(HashMap::with_capacity(n));
                continue;
            }
            if let Some(k) = line
                .strip_prefix('\\')
                .and_then(|l| l.strip_suffix("-grams:"))
            {
                let k: usize = k.parse().map_err(|_| bad(line.into()))?;
                if k == 0 || k > declared.len() {
                    return Err(bad(format!("section {k} not declared")));
                }
                section = Some(k);
                continue;
            }
            let k = section.ok_or_else(|| bad(format!("entry outside a section: {line}")))?;
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() < 2 {
                return Err(bad(format!("malformed entry {line}")));
            }
            let logp: f64 = fields[0].parse().map_err(|_| bad(line.into()))?;
            let words: Vec<String> = fields[1].split(' ').map(str::to_owned).collect();
            if words.len() != k {
                return Err(bad(format!("{k}-gram entry has {} words", words.len())));
            }
            let bow = match fields.get(2) {
                Some(b) => b.parse().map_err(|_| bad(line.into()))?,
                None => 0.0,
            };
            grams[k - 1].insert(words, (logp, bow));
        }
        for (i, (&n, g)) in declared.iter().zip(&grams).enumerate() {
            if n != g.len() {
                return Err(bad(format!("{}-grams: declared {n}, found {}", i + 1, g.len())));
            }
        }
        if grams.is_empty() {
            return Err(bad("no n-gram sections".into()));
        }
        Ok(Self {
            order: grams.len(),
            grams,
        })
    }

    /// log10 P(word | context) by the ARPA back-off rule.
    pub fn log10prob(&self, word: &str, context: &[&str]) -> Option<f64> {
        let keep = context.len().min(self.order - 1);
        let ctx = &context[context.len() - keep..];
        let mut gram: Vec<String> = ctx.iter().map(|s| (*s).to_owned()).collect();
        gram.push(word.to_owned());
        if let Some(&(p, _)) = self.grams[gram.len() - 1].get(&gram) {
            return Some(p);
        }
        if ctx.is_empty() {
            return None;
        }
        gram.pop();
        let bow = self.grams[gram.len() - 1].get(&gram).map_or(0.0, |&(_, b)| b);
        Some(bow + self.log10prob(word, &ctx[1..])?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(sentences: &[Vec<usize>], order: usize, v: usize) -> NgramModel {
        let counts = count_ngrams(sentences.iter().map(Vec::as_slice), order, v).unwrap();
        estimate_kneser_ney(&counts)
    }

    #[test]
    fn direct_tally() {
        let s = [vec![0, 1], vec![0, 1]];
        let c = count_ngrams(s.iter().map(Vec::as_slice), 2, 3).unwrap();
        assert_eq!(c.count(&[0, 1]), 2);
        assert_eq!(c.count(&[0]), 2);
        assert_eq!(c.count(&[1]), 2);
        assert_eq!(c.count(&[1, 0]), 0);
    }

    #[test]
    fn continuation_counts_distinct_predecessors() {
        // (a,b), (c,b): b has two distinct predecessors
        let s = [vec![0, 1], vec![2, 1]];
        let c = count_ngrams(s.iter().map(Vec::as_slice), 2, 3).unwrap();
        assert_eq!(c.continuation_count(&[1]), 2);
        // a and c only ever start a sentence: one (boundary) left context each
        assert_eq!(c.continuation_count(&[0]), 1);
        assert_eq!(c.continuation_count(&[2]), 1);
    }

    #[test]
    fn short_sentences_yield_no_long_windows() {
        let s = [vec![0, 1, 2]];
        let c = count_ngrams(s.iter().map(Vec::as_slice), 4, 3).unwrap();
        assert_eq!(c.num_grams(4), 0);
        assert_eq!(c.num_grams(3), 1);
    }

    #[test]
    fn bad_inputs() {
        let empty: Vec<Vec<usize>> = vec![vec![], vec![]];
        assert!(matches!(
            count_ngrams(empty.iter().map(Vec::as_slice), 2, 3),
            Err(Error::Empty(_))
        ));
        let s = [vec![0, 1]];
        assert!(count_ngrams(s.iter().map(Vec::as_slice), 5, 3).is_err());
        assert!(count_ngrams(s.iter().map(Vec::as_slice), 0, 3).is_err());
        assert!(count_ngrams(s.iter().map(Vec::as_slice), 2, 1).is_err());
    }

    #[test]
    fn discount_formula_and_fallback() {
        assert_eq!(discount_from_counts(&[1, 1, 1, 2, 5]), 3.0 / 5.0);
        assert_eq!(discount_from_counts(&[1, 3]), FALLBACK_DISCOUNT);
        assert_eq!(discount_from_counts(&[2, 2]), FALLBACK_DISCOUNT);
    }

    #[test]
    fn hand_computed_unigram() {
        // 5 types with raw counts 4, 3, 2, 1, 0 (index 4 never seen), V = 5
        let s = [vec![0, 0, 1, 2], vec![0, 1, 1], vec![0, 2, 3]];
        let m = model(&s, 1, 5);
        let total = 10.0;
        let expect = |c: f64| (1.0 - UNIFORM_FLOOR) * c / total + UNIFORM_FLOOR / 5.0;
        for (w, c) in [(0, 4.0), (1, 3.0), (2, 2.0), (3, 1.0), (4, 0.0)] {
            assert!((m.prob(w, &[]) - expect(c)).abs() < 1e-15, "word {w}");
        }
        let sum: f64 = (0..5).map(|w| m.prob(w, &[])).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_bigram_concentrates_mass() {
        let s = vec![vec![0, 1]; 50];
        let m = model(&s, 2, 4);
        let p = m.prob(1, &[0]);
        assert!(p > 0.98, "P(b|a) = {p}");
        let total: f64 = (0..4).map(|w| m.prob(w, &[0])).sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!((0..4).all(|w| m.prob(w, &[0]) > 0.0));
    }

    #[test]
    fn fully_covered_context_keeps_frequencies() {
        let s = [vec![0, 0], vec![0, 1], vec![0, 1]];
        let m = model(&s, 2, 2);
        assert!((m.prob(0, &[0]) - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.prob(1, &[0]) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.context(&[0]).unwrap().bow, 1.0);
    }

    #[test]
    fn unseen_context_falls_to_unigram() {
        let s = [vec![0, 1, 2, 0, 1]];
        let m = model(&s, 3, 6);
        assert_eq!(m.prob(1, &[5, 4]), m.prob(1, &[]));
        assert!(m.prob(5, &[5, 4]) > 0.0);
        assert_eq!(m.prob(5, &[5, 4]), UNIFORM_FLOOR / 6.0);
    }

    #[test]
    fn scoring_modes() {
        let s = [vec![0, 1, 2, 0, 1, 2, 3]];
        let m = model(&s, 4, 4);
        let short = [0, 1, 2];
        let c = m.sentence_log10prob_mode(&short, ScoringMode::Comparison).unwrap();
        assert_eq!(c.score, SentenceScore::ZERO);
        let f = m.sentence_log10prob_mode(&short, ScoringMode::Full).unwrap();
        assert_eq!(f.score.n_scored, 3);
        assert_eq!(f.mode, ScoringMode::Full);

        let uni = model(&s, 1, 4);
        let sent = [3, 0, 1, 1];
        let got = uni.sentence_log10prob(&sent).unwrap();
        let want: f64 = sent.iter().map(|&w| uni.prob(w, &[]).log10()).sum();
        assert_eq!(got.n_scored, 4);
        assert!((got.sum_log10 - want).abs() < 1e-12);
        assert!(uni.sentence_log10prob(&[9]).is_err());
    }

    #[test]
    fn json_round_trip_is_stable() {
        let s = [vec![0, 1, 2, 0, 1, 3], vec![2, 1, 0, 3]];
        let m = model(&s, 3, 5);
        let json = m.to_json().unwrap();
        let back = NgramModel::from_json(&json).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json().unwrap(), json);
    }

    #[test]
    fn arpa_header_counts() {
        let s = [vec![0, 1, 2, 0, 1, 3]];
        let m = model(&s, 2, 4);
        let arpa = m.to_arpa(None);
        assert!(arpa.contains("ngram 1=4\n"));
        assert!(arpa.contains("ngram 2=4\n"));
        assert!(arpa.trim_end().ends_with("\\end\\"));
        let parsed = ArpaModel::parse(&arpa).unwrap();
        assert_eq!(parsed.order, 2);
    }
}
