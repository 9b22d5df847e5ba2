//! Text preparation: sentence segmentation, tokenization with Porter stemming,
//! frequency pruning to an OOV token, index encoding and 8:1:1 splitting.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::porter;

/// Token standing in for every pruned or unseen stem.
pub const OOV_TOKEN: &str = "<unk>";

/// Minimum corpus-wide count a stem needs to survive pruning.
pub const MIN_COUNT: usize = 2;
/// Minimum relative frequency a stem needs to survive pruning.
pub const MIN_FREQUENCY: f64 = 1e-5;

/// Hard ceiling on the fraction of tokens mapped to OOV.
pub const MAX_OOV_RATE: f64 = 0.05;
/// OOV rates observed on natural text usually fall in this band.
pub const TYPICAL_OOV_RATE: (f64, f64) = (0.005, 0.015);

pub const COVERAGE_KS: [usize; 3] = [500, 1000, 2000];

pub const ENCODED_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub author_id: String,
    pub text: String,
}

impl RawDocument {
    pub fn new(author_id: impl Into<String>, text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::Empty("document text"));
        }
        Ok(Self {
            author_id: author_id.into(),
            text,
        })
    }

    /// Builds a document from phrase-per-line input (subtitle style), joining
    /// the lines with single spaces before any segmentation happens.
    pub fn from_phrases(author_id: impl Into<String>, lines: &str) -> Result<Self> {
        let joined = lines
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect::<Vec<_>>()
            .join(" ");
        Self::new(author_id, joined)
    }
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '?' | '!')
}

/// Splits text after every '.', '?' or '!' that is followed by whitespace or
/// the end of the text. Abbreviations are not special-cased, so "e.g. this"
/// becomes two sentences. Text without any boundary comes back whole.
pub fn segment_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if !is_terminal(c) {
            continue;
        }
        let boundary = match iter.peek() {
            None => true,
            Some(&(_, next)) => next.is_whitespace(),
        };
        if boundary {
            let end = i + c.len_utf8();
            push_trimmed(&mut out, &text[start..end]);
            start = end;
        }
    }
    push_trimmed(&mut out, &text[start..]);
    out
}

fn push_trimmed(out: &mut Vec<String>, piece: &str) {
    let piece = piece.trim();
    if !piece.is_empty() {
        out.push(piece.to_owned());
    }
}

/// Lowercased maximal alphanumeric runs; punctuation is dropped.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Porter stem for word tokens; tokens carrying a digit pass through unchanged.
pub fn stem_token(token: &str) -> String {
    if token.chars().any(|c| c.is_ascii_digit()) {
        token.to_owned()
    } else {
        porter::stem(token)
    }
}

pub fn tokenize_and_stem(sentence: &str) -> Vec<String> {
    tokenize(sentence).iter().map(|t| stem_token(t)).collect()
}

/// One author's text after segmentation and tokenization. Sentences with no
/// tokens are dropped, so `tokens[i]` and `stems[i]` always line up.
#[derive(Debug, Clone)]
pub struct PreparedText {
    pub author_id: String,
    pub tokens: Vec<Vec<String>>,
    pub stems: Vec<Vec<String>>,
}

pub fn prepare_document(doc: &RawDocument) -> PreparedText {
    let mut tokens = Vec::new();
    let mut stems = Vec::new();
    for sentence in segment_sentences(&doc.text) {
        let toks = tokenize(&sentence);
        if toks.is_empty() {
            continue;
        }
        stems.push(toks.iter().map(|t| stem_token(t)).collect());
        tokens.push(toks);
    }
    PreparedText {
        author_id: doc.author_id.clone(),
        tokens,
        stems,
    }
}

fn survives(count: usize, total: usize) -> bool {
    count >= MIN_COUNT && (count as f64) / (total as f64) >= MIN_FREQUENCY
}

fn count_tokens<'a, I>(sentences: I) -> (HashMap<&'a str, usize>, usize)
where
    I: IntoIterator<Item = &'a Vec<String>>,
{
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut total = 0;
    for sentence in sentences {
        for tok in sentence {
            *counts.entry(tok.as_str()).or_default() += 1;
            total += 1;
        }
    }
    (counts, total)
}

/// Stems that survive pruning, most frequent first, ties broken lexically.
fn ranked_survivors(counts: &HashMap<&str, usize>, total: usize) -> Vec<(String, usize)> {
    let mut kept: Vec<(String, usize)> = counts
        .iter()
        .filter(|(_, &c)| survives(c, total))
        .map(|(s, &c)| ((*s).to_owned(), c))
        .collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    kept
}

/// Bidirectional stem/index map. The OOV token is always the last entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<String>,
    index: HashMap<String, usize>,
    oov_index: usize,
}

impl Vocabulary {
    /// Rebuilds a vocabulary from its serialized entry list.
    pub fn from_entries(entries: Vec<String>, oov_index: usize) -> Result<Self> {
        if oov_index >= entries.len() || entries[oov_index] != OOV_TOKEN {
            return Err(Error::Format(format!(
                "oov_index {oov_index} does not point at {OOV_TOKEN}"
            )));
        }
        let mut index = HashMap::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::Format(format!("duplicate vocabulary entry {e:?}")));
            }
        }
        Ok(Self {
            entries,
            index,
            oov_index,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn oov_index(&self) -> usize {
        self.oov_index
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn word(&self, index: usize) -> Option<&str> {
        self.entries.get(index).map(String::as_str)
    }

    /// Index of a stem, or the OOV index when the stem is unknown.
    pub fn index_of(&self, stem: &str) -> usize {
        self.index.get(stem).copied().unwrap_or(self.oov_index)
    }

    pub fn contains(&self, stem: &str) -> bool {
        stem != OOV_TOKEN && self.index.contains_key(stem)
    }

    pub fn encode<S: AsRef<str>>(&self, stems: &[S]) -> Vec<usize> {
        stems.iter().map(|s| self.index_of(s.as_ref())).collect()
    }

    pub fn decode(&self, indices: &[usize]) -> Result<Vec<&str>> {
        indices
            .iter()
            .map(|&i| {
                self.word(i).ok_or(Error::IndexOutOfRange {
                    index: i,
                    vocab: self.len(),
                })
            })
            .collect()
    }
}

/// Builds the pruned vocabulary from stemmed sentences.
///
/// A stem is kept when it occurs at least twice and makes up at least 1e-5 of
/// all tokens; everything else maps to [`OOV_TOKEN`]. Entries are ordered by
/// descending count with a lexicographic tie-break.
pub fn build_vocabulary(stemmed: &[Vec<String>]) -> Result<Vocabulary> {
    let (counts, total) = count_tokens(stemmed);
    if total == 0 {
        return Err(Error::Empty("stemmed corpus"));
    }
    let kept = ranked_survivors(&counts, total);
    if kept.len() < 2 {
        return Err(Error::DegenerateVocabulary {
            surviving: kept.len(),
        });
    }
    let mut entries: Vec<String> = kept.into_iter().map(|(s, _)| s).collect();
    entries.push(OOV_TOKEN.to_owned());
    let oov = entries.len() - 1;
    Vocabulary::from_entries(entries, oov)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitLabel {
    Train,
    Valid,
    Test,
}

/// 8:1:1 split of `n` sentences. Validation and test each get `n / 10`
/// (rounded down); training absorbs the remainder. Labels are indexed by the
/// original sentence order; the assignment is a seeded shuffle.
pub fn split_labels(n: usize, seed: u64) -> Result<Vec<SplitLabel>> {
    if n < 10 {
        return Err(Error::CorpusTooSmall { sentences: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let held = n / 10;
    let mut labels = vec![SplitLabel::Train; n];
    for &i in &order[..held] {
        labels[i] = SplitLabel::Test;
    }
    for &i in &order[held..2 * held] {
        labels[i] = SplitLabel::Valid;
    }
    Ok(labels)
}

/// One author's sentences as vocabulary indices, with split assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedCorpus {
    pub format_version: u32,
    pub author_id: String,
    pub vocab: Vec<String>,
    pub oov_index: usize,
    pub sentences: Vec<Vec<usize>>,
    pub split_labels: Vec<SplitLabel>,
    pub seed: u64,
}

pub fn encode_and_split(
    author_id: &str,
    stemmed: &[Vec<String>],
    vocab: &Vocabulary,
    seed: u64,
) -> Result<EncodedCorpus> {
    let split_labels = split_labels(stemmed.len(), seed)?;
    Ok(EncodedCorpus {
        format_version: ENCODED_FORMAT_VERSION,
        author_id: author_id.to_owned(),
        vocab: vocab.entries().to_vec(),
        oov_index: vocab.oov_index(),
        sentences: stemmed.iter().map(|s| vocab.encode(s)).collect(),
        split_labels,
        seed,
    })
}

impl EncodedCorpus {
    pub fn vocabulary(&self) -> Result<Vocabulary> {
        Vocabulary::from_entries(self.vocab.clone(), self.oov_index)
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn split(&self, label: SplitLabel) -> impl Iterator<Item = &[usize]> + '_ {
        self.sentences
            .iter()
            .zip(&self.split_labels)
            .filter(move |(_, &l)| l == label)
            .map(|(s, _)| s.as_slice())
    }

    pub fn split_sentences(&self, label: SplitLabel) -> Vec<Vec<usize>> {
        self.split(label).map(<[usize]>::to_vec).collect()
    }

    pub fn split_count(&self, label: SplitLabel) -> usize {
        self.split_labels.iter().filter(|&&l| l == label).count()
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != ENCODED_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported encoded corpus version {}",
                self.format_version
            )));
        }
        self.vocabulary()?;
        if self.split_labels.len() != self.sentences.len() {
            return Err(Error::Format("split label count differs from sentence count".into()));
        }
        let v = self.vocab.len();
        for s in &self.sentences {
            if let Some(&bad) = s.iter().find(|&&i| i >= v) {
                return Err(Error::IndexOutOfRange { index: bad, vocab: v });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }
}

/// Training pairs drawn from in-sentence windows of `n` consecutive tokens.
/// Contexts are stored flat, `n - 1` indices per pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextSet {
    width: usize,
    contexts: Vec<usize>,
    targets: Vec<usize>,
}

impl ContextSet {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            ..Self::default()
        }
    }

    pub fn push(&mut self, context: &[usize], target: usize) {
        assert_eq!(context.len(), self.width, "context width");
        self.contexts.extend_from_slice(context);
        self.targets.push(target);
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn context(&self, i: usize) -> &[usize] {
        &self.contexts[i * self.width..(i + 1) * self.width]
    }

    pub fn target(&self, i: usize) -> usize {
        self.targets[i]
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], usize)> + '_ {
        (0..self.len()).map(move |i| (self.context(i), self.target(i)))
    }

    /// Gathers the listed pairs into a new set, in the given order.
    pub fn select(&self, rows: &[usize]) -> ContextSet {
        let mut out = ContextSet::new(self.width);
        for &r in rows {
            out.push(self.context(r), self.target(r));
        }
        out
    }
}

/// Windows of `n` tokens inside each sentence; `target_pos` (1-based) picks the
/// predicted word, the other `n - 1` words form the context in original order.
/// Sentences shorter than `n` contribute nothing.
pub fn extract_contexts<'a, I>(sentences: I, n: usize, target_pos: usize) -> Result<ContextSet>
where
    I: IntoIterator<Item = &'a [usize]>,
{
    if n < 2 {
        return Err(Error::InvalidConfig {
            field: "n",
            reason: format!("context size must be at least 2, got {n}"),
        });
    }
    if !(1..=n).contains(&target_pos) {
        return Err(Error::InvalidConfig {
            field: "t",
            reason: format!("target position must be in 1..={n}, got {target_pos}"),
        });
    }
    let t = target_pos - 1;
    let mut set = ContextSet::new(n - 1);
    let mut ctx = Vec::with_capacity(n - 1);
    for sentence in sentences {
        for window in sentence.windows(n) {
            ctx.clear();
            ctx.extend(window.iter().enumerate().filter(|(i, _)| *i != t).map(|(_, &w)| w));
            set.push(&ctx, window[t]);
        }
    }
    Ok(set)
}

/// Per-author corpus profile: sentence/word counts, vocabulary size through
/// the pipeline stages and top-k coverage after pruning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub author_id: String,
    pub n_sentences: usize,
    pub n_words: usize,
    pub words_per_sentence: f64,
    pub vocab_original: usize,
    pub vocab_stemmed: usize,
    /// Surviving stems plus the OOV entry.
    pub vocab_pruned: usize,
    pub coverage_topk: BTreeMap<usize, f64>,
    pub oov_rate: f64,
}

pub fn corpus_stats(text: &PreparedText) -> CorpusStats {
    let n_sentences = text.tokens.len();
    let originals: HashSet<&str> = text.tokens.iter().flatten().map(String::as_str).collect();
    let (counts, total) = count_tokens(&text.stems);
    let kept = ranked_survivors(&counts, total);
    let covered: usize = kept.iter().map(|(_, c)| c).sum();
    let denom = total.max(1) as f64;
    let coverage_topk = COVERAGE_KS
        .iter()
        .map(|&k| {
            let top: usize = kept.iter().take(k).map(|(_, c)| c).sum();
            (k, top as f64 / denom)
        })
        .collect();
    CorpusStats {
        author_id: text.author_id.clone(),
        n_sentences,
        n_words: total,
        words_per_sentence: if n_sentences == 0 {
            0.0
        } else {
            total as f64 / n_sentences as f64
        },
        vocab_original: originals.len(),
        vocab_stemmed: counts.len(),
        vocab_pruned: kept.len() + 1,
        coverage_topk,
        oov_rate: if total == 0 {
            0.0
        } else {
            (total - covered) as f64 / denom
        },
    }
}

impl CorpusStats {
    /// Fails when more than [`MAX_OOV_RATE`] of the tokens were pruned; warns
    /// when the rate falls outside the typical band.
    pub fn check_oov_rate(&self) -> Result<()> {
        if self.oov_rate > MAX_OOV_RATE {
            return Err(Error::Invalid(format!(
                "author {}: OOV rate {:.4} exceeds {MAX_OOV_RATE}",
                self.author_id, self.oov_rate
            )));
        }
        let (lo, hi) = TYPICAL_OOV_RATE;
        if self.oov_rate < lo || self.oov_rate > hi {
            log::warn!(
                "author {}: OOV rate {:.4} outside the usual {lo}..{hi} band",
                self.author_id,
                self.oov_rate
            );
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stems(words: &[(&str, usize)]) -> Vec<Vec<String>> {
        vec![words
            .iter()
            .flat_map(|(w, c)| std::iter::repeat_n(w.to_string(), *c))
            .collect()]
    }

    #[test]
    fn segments_on_terminal_punctuation() {
        assert_eq!(
            segment_sentences("We sort. Then we merge!"),
            vec!["We sort.", "Then we merge!"]
        );
        assert_eq!(
            segment_sentences("e.g. no split here"),
            vec!["e.g.", "no split here"]
        );
        assert_eq!(segment_sentences("no boundary at all"), vec!["no boundary at all"]);
        assert_eq!(segment_sentences("3.14 is pi. ok"), vec!["3.14 is pi.", "ok"]);
        assert_eq!(segment_sentences("Wait... what?!  Yes."), vec!["Wait...", "what?!", "Yes."]);
    }

    #[test]
    fn mixed_paragraph_round_trips() {
        let text = "Is it sorted?  Yes it is.\nThen we merge.";
        let parts = segment_sentences(text);
        assert_eq!(parts.len(), 3);
        let squash = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
        assert_eq!(squash(&parts.join(" ")), squash(text));
    }

    #[test]
    fn tokenizes_and_stems() {
        assert_eq!(tokenize_and_stem("caresses ponies"), vec!["caress", "poni"]);
        assert_eq!(tokenize_and_stem("Sky"), vec!["sky"]);
        assert_eq!(tokenize_and_stem("relational"), vec!["relat"]);
        assert_eq!(tokenize_and_stem("In 2015, MP3s!"), vec!["in", "2015", "mp3s"]);
        assert!(tokenize_and_stem("").is_empty());
        assert!(tokenize_and_stem("?!, ...").is_empty());
    }

    #[test]
    fn phrase_mode_concatenates_lines() {
        let doc = RawDocument::from_phrases("a", "so today we\nwill look at\n\nsorting. next").unwrap();
        assert_eq!(doc.text, "so today we will look at sorting. next");
        assert!(RawDocument::new("a", "  \n").is_err());
    }

    #[test]
    fn singleton_stems_pruned() {
        let v = build_vocabulary(&stems(&[("a", 10), ("b", 1), ("c", 5)])).unwrap();
        assert_eq!(v.entries(), &["a", "c", OOV_TOKEN]);
        assert_eq!(v.index_of("b"), v.oov_index());
        assert_eq!(v.index_of("a"), 0);
        assert_eq!(v.oov_index(), 2);
    }

    #[test]
    fn low_frequency_stems_pruned() {
        // count 3 of 400,000 tokens: 7.5e-6 < 1e-5
        let corpus = stems(&[("rare", 3), ("common", 200_000), ("other", 199_997)]);
        let v = build_vocabulary(&corpus).unwrap();
        assert!(!v.contains("rare"));
        assert!(v.contains("common") && v.contains("other"));
        // count 4 of 400,000 = 1e-5 exactly survives
        let corpus = stems(&[("rare", 4), ("common", 200_000), ("other", 199_996)]);
        assert!(build_vocabulary(&corpus).unwrap().contains("rare"));
    }

    #[test]
    fn vocabulary_ties_break_lexically() {
        let v = build_vocabulary(&stems(&[("zeta", 3), ("alpha", 3), ("mid", 5)])).unwrap();
        assert_eq!(v.entries(), &["mid", "alpha", "zeta", OOV_TOKEN]);
    }

    #[test]
    fn degenerate_vocabulary_rejected() {
        let err = build_vocabulary(&stems(&[("a", 1), ("b", 1), ("c", 1)])).unwrap_err();
        assert!(matches!(err, Error::DegenerateVocabulary { surviving: 0 }));
        let err = build_vocabulary(&stems(&[("a", 5), ("b", 1)])).unwrap_err();
        assert!(matches!(err, Error::DegenerateVocabulary { surviving: 1 }));
    }

    fn label_counts(labels: &[SplitLabel]) -> (usize, usize, usize) {
        let c = |l| labels.iter().filter(|&&x| x == l).count();
        (c(SplitLabel::Train), c(SplitLabel::Valid), c(SplitLabel::Test))
    }

    #[test]
    fn split_ratios() {
        assert_eq!(label_counts(&split_labels(10, 1).unwrap()), (8, 1, 1));
        assert_eq!(label_counts(&split_labels(5672, 3).unwrap()), (4538, 567, 567));
        assert_eq!(label_counts(&split_labels(19, 3).unwrap()), (17, 1, 1));
        assert!(matches!(
            split_labels(9, 1),
            Err(Error::CorpusTooSmall { sentences: 9 })
        ));
    }

    #[test]
    fn split_is_seeded() {
        let a = split_labels(100, 7).unwrap();
        assert_eq!(a, split_labels(100, 7).unwrap());
        assert_ne!(a, split_labels(100, 8).unwrap());
    }

    #[test]
    fn contexts_from_windows() {
        let s: Vec<usize> = vec![5, 7, 9, 2];
        let set = extract_contexts([s.as_slice()], 4, 4).unwrap();
        assert_eq!(set.iter().collect::<Vec<_>>(), vec![(&[5, 7, 9][..], 2)]);

        let s: Vec<usize> = vec![5, 7, 9, 2, 4];
        let set = extract_contexts([s.as_slice()], 4, 4).unwrap();
        assert_eq!(
            set.iter().collect::<Vec<_>>(),
            vec![(&[5, 7, 9][..], 2), (&[7, 9, 2][..], 4)]
        );

        let s: Vec<usize> = vec![5, 7, 9, 2];
        let set = extract_contexts([s.as_slice()], 4, 2).unwrap();
        assert_eq!(set.iter().collect::<Vec<_>>(), vec![(&[5, 9, 2][..], 7)]);

        let short: Vec<usize> = vec![1, 2, 3];
        assert!(extract_contexts([short.as_slice()], 4, 4).unwrap().is_empty());
        assert!(extract_contexts([short.as_slice()], 4, 5).is_err());
        assert!(extract_contexts([short.as_slice()], 1, 1).is_err());
    }

    #[test]
    fn stats_words_per_sentence() {
        let doc = RawDocument::new("x", "one two three. four five! six").unwrap();
        let st = corpus_stats(&prepare_document(&doc));
        assert_eq!(st.n_sentences, 3);
        assert_eq!(st.n_words, 6);
        assert!((st.words_per_sentence - 2.0).abs() < 1e-12);
        // the published profile's first row: 121,675 words over 5,672 sentences
        assert!(((121_675.0 / 5_672.0_f64) * 100.0).round() / 100.0 == 21.45);
    }

    #[test]
    fn stats_all_distinct_words() {
        let doc = RawDocument::new("x", "alpha beta gamma. delta epsilon zeta.").unwrap();
        let prepared = prepare_document(&doc);
        let st = corpus_stats(&prepared);
        assert_eq!(st.vocab_pruned, 1);
        assert!((st.oov_rate - 1.0).abs() < 1e-12);
        assert!(st.check_oov_rate().is_err());
        assert!(build_vocabulary(&prepared.stems).is_err());
    }

    #[test]
    fn encoded_corpus_json_round_trip() {
        let text = (0..12)
            .map(|i| format!("the cat sat on mat number {}. ", i % 3))
            .collect::<String>();
        let prepared = prepare_document(&RawDocument::new("cat", text).unwrap());
        let vocab = build_vocabulary(&prepared.stems).unwrap();
        let enc = encode_and_split("cat", &prepared.stems, &vocab, 4).unwrap();
        let back = EncodedCorpus::from_json(&enc.to_json().unwrap()).unwrap();
        assert_eq!(back, enc);
        assert_eq!(enc.to_json().unwrap(), back.to_json().unwrap());

        let mut bad = enc.clone();
        bad.sentences[0][0] = 999;
        assert!(EncodedCorpus::from_json(&bad.to_json().unwrap()).is_err());
    }
}
