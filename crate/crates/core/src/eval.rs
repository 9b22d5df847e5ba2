//! Perplexity, minimum-perplexity attribution, accuracy curves and confusion
//! matrices.
//!
//! Multi-sentence passages are scored by pooling: log10 probabilities and
//! scored-word counts are summed across sentences and turned into a single
//! perplexity. The predicted author is the candidate with the lowest
//! perplexity (highest average log-likelihood). Ties go to the first
//! candidate in author-id order and are flagged.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::lm::{LanguageModel, SentenceScore};

/// `10^(-sum_log10 / n_scored)`.
pub fn perplexity(sum_log10: f64, n_scored: usize) -> Result<f64> {
    if n_scored == 0 {
        return Err(Error::NoScoreableWords);
    }
    Ok(10f64.powf(-sum_log10 / n_scored as f64))
}

pub fn score_perplexity(score: SentenceScore) -> Result<f64> {
    perplexity(score.sum_log10, score.n_scored)
}

/// Mean and population standard deviation. Empty input gives (NaN, NaN).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Relative perplexity reduction of `model` against `baseline`, in percent.
pub fn reduction_pct(baseline: f64, model: f64) -> f64 {
    (baseline - model) / baseline * 100.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Ngram(usize),
    Nnlm,
}

impl ModelKind {
    /// Number of words in the model's scoring window, for NNLMs given
    /// separately since it is a training parameter.
    pub fn order(self, nnlm_context: usize) -> usize {
        match self {
            ModelKind::Ngram(k) => k,
            ModelKind::Nnlm => nnlm_context,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Ngram(k) => write!(f, "ngram-{k}"),
            ModelKind::Nnlm => f.write_str("nnlm"),
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "nnlm" {
            return Ok(ModelKind::Nnlm);
        }
        s.strip_prefix("ngram-")
            .and_then(|k| k.parse().ok())
            .filter(|k| (1..=crate::ngram::MAX_ORDER).contains(k))
            .map(ModelKind::Ngram)
            .ok_or_else(|| Error::Invalid(format!("unknown model kind {s:?}")))
    }
}

impl Serialize for ModelKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ModelKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A candidate author: its model and the vocabulary the model was trained on.
pub struct Candidate<'a> {
    pub author_id: String,
    pub model: &'a dyn LanguageModel,
    pub vocab: &'a Vocabulary,
}

/// Per-sentence, per-candidate scores of one pool of test sentences.
///
/// Candidates are kept in author-id order, which is also the tie-break order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    candidates: Vec<String>,
    /// `rows[sentence][candidate]`
    rows: Vec<Vec<SentenceScore>>,
}

impl ScoreTable {
    /// Fills the table with `score(sentence, candidate)`, candidates being
    /// indices into `candidates` after sorting.
    pub fn from_fn<F>(n_sentences: usize, candidates: &[String], score: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<SentenceScore> + Sync,
    {
        let sorted = sorted_unique(candidates)?;
        let rows = (0..n_sentences)
            .into_par_iter()
            .map(|s| (0..sorted.len()).map(|c| score(s, c)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Ok(ScoreTable {
            candidates: sorted,
            rows,
        })
    }

    /// Scores stemmed sentences under every candidate, encoding each sentence
    /// with the candidate's own vocabulary. Positions before `first` are
    /// skipped (see [`LanguageModel::sentence_log10prob_from`]).
    pub fn build<S: AsRef<str> + Sync>(
        sentences: &[Vec<S>],
        candidates: &[Candidate<'_>],
        first: usize,
    ) -> Result<Self> {
        let mut order: Vec<&Candidate<'_>> = candidates.iter().collect();
        order.sort_by(|a, b| a.author_id.cmp(&b.author_id));
        let ids: Vec<String> = order.iter().map(|c| c.author_id.clone()).collect();
        Self::from_fn(sentences.len(), &ids, |s, c| {
            let cand = order[c];
            let encoded = cand.vocab.encode(&sentences[s]);
            cand.model.sentence_log10prob_from(&encoded, first)
        })
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, sentence: usize) -> &[SentenceScore] {
        &self.rows[sentence]
    }

    /// Pooled score per candidate over the chosen sentences.
    pub fn totals(&self, sentences: &[usize]) -> Vec<SentenceScore> {
        let mut totals = vec![SentenceScore::ZERO; self.candidates.len()];
        for &s in sentences {
            for (t, &x) in totals.iter_mut().zip(&self.rows[s]) {
                *t += x;
            }
        }
        totals
    }

    /// Only sentences for which every candidate scored at least one word.
    pub fn scoreable_rows(&self) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&s| self.rows[s].iter().all(|x| x.n_scored > 0))
            .collect()
    }

    pub fn classify(&self, sentences: &[usize]) -> Result<Decision> {
        if self.candidates.len() < 2 {
            return Err(Error::Invalid("classification needs at least 2 candidates".into()));
        }
        decide(&self.totals(sentences))
    }
}

fn sorted_unique(ids: &[String]) -> Result<Vec<String>> {
    let set: BTreeSet<&String> = ids.iter().collect();
    if set.len() != ids.len() {
        return Err(Error::Invalid("duplicate candidate author ids".into()));
    }
    Ok(set.into_iter().cloned().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    /// Index into the candidate list.
    pub predicted: usize,
    /// `None` for candidates that scored no words.
    pub perplexities: Vec<Option<f64>>,
    pub tie: bool,
}

/// Minimum-perplexity decision over pooled candidate scores.
pub fn decide(totals: &[SentenceScore]) -> Result<Decision> {
    let perplexities: Vec<Option<f64>> = totals.iter().map(|&t| score_perplexity(t).ok()).collect();
    let mut best: Option<(usize, f64)> = None;
    let mut tie = false;
    for (i, p) in perplexities.iter().enumerate() {
        let Some(p) = *p else { continue };
        match best {
            None => best = Some((i, p)),
            Some((_, b)) if p < b => {
                best = Some((i, p));
                tie = false;
            }
            Some((_, b)) if p == b => tie = true,
            _ => {}
        }
    }
    let (predicted, _) = best.ok_or(Error::NoScoreableWords)?;
    Ok(Decision {
        predicted,
        perplexities,
        tie,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePerplexity {
    pub author_id: String,
    pub perplexity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationTrial {
    pub true_author: Option<String>,
    pub predicted_author: String,
    pub n_sentences: usize,
    /// In author-id order.
    pub perplexities: Vec<CandidatePerplexity>,
    pub tie: bool,
}

impl ClassificationTrial {
    fn from_decision(table: &ScoreTable, d: Decision, n: usize, true_author: Option<String>) -> Self {
        ClassificationTrial {
            true_author,
            predicted_author: table.candidates[d.predicted].clone(),
            n_sentences: n,
            perplexities: table
                .candidates
                .iter()
                .zip(d.perplexities)
                .map(|(a, p)| CandidatePerplexity {
                    author_id: a.clone(),
                    perplexity: p,
                })
                .collect(),
            tie: d.tie,
        }
    }

    /// Candidates ranked by perplexity, unscored ones last.
    pub fn ranked(&self) -> Vec<&CandidatePerplexity> {
        let mut r: Vec<_> = self.perplexities.iter().collect();
        r.sort_by(|a, b| {
            let key = |c: &CandidatePerplexity| c.perplexity.unwrap_or(f64::INFINITY);
            key(a).total_cmp(&key(b))
        });
        r
    }
}

/// Attributes a passage of stemmed sentences to one of the candidates.
pub fn classify<S: AsRef<str> + Sync>(
    sentences: &[Vec<S>],
    candidates: &[Candidate<'_>],
) -> Result<ClassificationTrial> {
    if candidates.len() < 2 {
        return Err(Error::Invalid("classification needs at least 2 candidates".into()));
    }
    if sentences.is_empty() {
        return Err(Error::NoScoreableWords);
    }
    let table = ScoreTable::build(sentences, candidates, 0)?;
    let all: Vec<usize> = (0..table.len()).collect();
    let d = table.classify(&all)?;
    Ok(ClassificationTrial::from_decision(&table, d, sentences.len(), None))
}

/// Groups of author ids that denote the same underlying author.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AliasGroups(pub Vec<Vec<String>>);

impl AliasGroups {
    pub fn group_of(&self, author: &str) -> Option<usize> {
        self.0.iter().position(|g| g.iter().any(|a| a == author))
    }

    pub fn is_aliased(&self, author: &str) -> bool {
        self.group_of(author).is_some()
    }

    /// Same author or members of one alias group.
    pub fn same_identity(&self, a: &str, b: &str) -> bool {
        a == b || matches!((self.group_of(a), self.group_of(b)), (Some(x), Some(y)) if x == y)
    }
}

/// Test sentences of one author, scored under every candidate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestPool {
    pub author_id: String,
    pub table: ScoreTable,
}

/// One RNG stream per (author, sentence count, trial): results do not depend
/// on evaluation order.
pub fn trial_rng(seed: u64, author: usize, n_sentences: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((author as u64) << 40) ^ ((n_sentences as u64) << 20) ^ trial as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub true_author: String,
    pub n_sentences: usize,
    pub trial: usize,
    pub sentences: Vec<usize>,
    pub predicted_author: String,
    pub correct: bool,
    pub tie: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub author_id: String,
    pub n_sentences: usize,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyCurve {
    pub trials: usize,
    pub points: Vec<CurvePoint>,
    /// Mean over non-aliased authors of their per-author means and stds.
    pub average: Vec<CurvePoint>,
    pub skipped: Vec<String>,
    pub log: Vec<TrialRecord>,
}

pub const AVERAGE_LABEL: &str = "Avg";

impl AccuracyCurve {
    pub fn mean_at(&self, author: &str, n: usize) -> Option<f64> {
        self.points
            .iter()
            .chain(&self.average)
            .find(|p| p.author_id == author && p.n_sentences == n)
            .map(|p| p.mean)
    }
}

fn run_trial(
    pool: &TestPool,
    rows: &[usize],
    rng: &mut ChaCha8Rng,
    n: usize,
    trial: usize,
    aliases: &AliasGroups,
) -> Result<TrialRecord> {
    let picked: Vec<usize> = rand::seq::index::sample(rng, rows.len(), n)
        .into_iter()
        .map(|i| rows[i])
        .collect();
    let d = pool.table.classify(&picked)?;
    let predicted = &pool.table.candidates[d.predicted];
    Ok(TrialRecord {
        true_author: pool.author_id.clone(),
        n_sentences: n,
        trial,
        sentences: picked,
        predicted_author: predicted.clone(),
        correct: aliases.same_identity(&pool.author_id, predicted),
        tie: d.tie,
    })
}

/// Accuracy against the number of randomly drawn test sentences.
///
/// For every author and every `n` in `s_range`, draws `n` sentences without
/// replacement `trials` times and classifies them. Predicting an alias of the
/// true author counts as correct; aliased authors are left out of the
/// averaged curve. Pools with fewer scoreable sentences than the largest `n`
/// are skipped with a warning.
pub fn accuracy_curve(
    pools: &[TestPool],
    aliases: &AliasGroups,
    s_range: RangeInclusive<usize>,
    trials: usize,
    seed: u64,
) -> Result<AccuracyCurve> {
    if *s_range.start() == 0 || s_range.is_empty() || trials == 0 {
        return Err(Error::Invalid("sentence range must start at 1 and trials be positive".into()));
    }
    let max_n = *s_range.end();
    let mut skipped = Vec::new();
    let mut jobs = Vec::new();
    for (a, pool) in pools.iter().enumerate() {
        let rows = pool.table.scoreable_rows();
        if rows.len() < max_n {
            log::warn!(
                "skipping {}: {} scoreable test sentences, need {max_n}",
                pool.author_id,
                rows.len()
            );
            skipped.push(pool.author_id.clone());
            continue;
        }
        for n in s_range.clone() {
            jobs.push((a, n, rows.clone()));
        }
    }

    let results: Vec<(usize, usize, Vec<TrialRecord>)> = jobs
        .into_par_iter()
        .map(|(a, n, rows)| {
            let log = (0..trials)
                .map(|t| run_trial(&pools[a], &rows, &mut trial_rng(seed, a, n, t), n, t, aliases))
                .collect::<Result<Vec<_>>>()?;
            Ok((a, n, log))
        })
        .collect::<Result<_>>()?;

    let mut points = Vec::with_capacity(results.len());
    let mut by_n: BTreeMap<usize, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    let mut log = Vec::with_capacity(results.len() * trials);
    for (a, n, trial_log) in results {
        let hits: Vec<f64> = trial_log.iter().map(|r| f64::from(u8::from(r.correct))).collect();
        let (mean, std) = mean_std(&hits);
        let author = &pools[a].author_id;
        if !aliases.is_aliased(author) {
            let e = by_n.entry(n).or_default();
            e.0.push(mean);
            e.1.push(std);
        }
        points.push(CurvePoint {
            author_id: author.clone(),
            n_sentences: n,
            mean,
            std,
        });
        log.extend(trial_log);
    }
    for author in pools.iter().map(|p| &p.author_id) {
        let first = points.iter().find(|p| &p.author_id == author && p.n_sentences == *s_range.start());
        let last = points.iter().find(|p| &p.author_id == author && p.n_sentences == max_n);
        if let (Some(f), Some(l)) = (first, last) {
            if l.mean < f.mean {
                log::warn!("{author}: accuracy at {max_n} sentences below accuracy at {}", f.n_sentences);
            }
        }
    }
    let average = by_n
        .into_iter()
        .map(|(n, (means, stds))| CurvePoint {
            author_id: AVERAGE_LABEL.into(),
            n_sentences: n,
            mean: mean_std(&means).0,
            std: mean_std(&stds).0,
        })
        .collect();
    Ok(AccuracyCurve {
        trials,
        points,
        average,
        skipped,
        log,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// Row (true) and column (predicted) labels.
    pub authors: Vec<String>,
    pub trials: usize,
    pub floor: f64,
    pub counts: Vec<Vec<usize>>,
    /// log10(count / trials), zero counts at `floor`.
    pub log10: Vec<Vec<f64>>,
}

impl ConfusionMatrix {
    pub fn entry(&self, true_author: &str, predicted: &str) -> Option<f64> {
        let i = self.authors.iter().position(|a| a == true_author)?;
        let j = self.authors.iter().position(|a| a == predicted)?;
        Some(self.log10[i][j])
    }
}

/// Single-sentence assignment frequencies, `trials` per true author.
pub fn confusion_matrix(pools: &[TestPool], trials: usize, seed: u64) -> Result<ConfusionMatrix> {
    let authors = pools
        .first()
        .ok_or(Error::Empty("test pools"))?
        .table
        .candidates
        .clone();
    if authors.len() < 2 || trials == 0 {
        return Err(Error::Invalid("confusion matrix needs 2 candidates and trials > 0".into()));
    }
    let mut row_of = BTreeMap::new();
    for (a, pool) in pools.iter().enumerate() {
        if pool.table.candidates != authors {
            return Err(Error::Invalid("test pools disagree on candidates".into()));
        }
        row_of.insert(pool.author_id.clone(), a);
    }
    if row_of.keys().ne(authors.iter()) {
        return Err(Error::Invalid("every candidate needs exactly one test pool".into()));
    }
    let counts = authors
        .par_iter()
        .map(|author| {
            let a = row_of[author];
            let pool = &pools[a];
            let rows = pool.table.scoreable_rows();
            if rows.is_empty() {
                return Err(Error::NoScoreableWords);
            }
            let mut row = vec![0usize; authors.len()];
            for t in 0..trials {
                let r = run_trial(pool, &rows, &mut trial_rng(seed, a, 0, t), 1, t, &AliasGroups::default())?;
                row[authors.iter().position(|x| *x == r.predicted_author).unwrap_or_default()] += 1;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    ConfusionMatrix::from_counts(authors, counts, trials)
}

impl ConfusionMatrix {
    /// Builds the log matrix from raw assignment counts; every row must sum
    /// to `trials`.
    pub fn from_counts(authors: Vec<String>, counts: Vec<Vec<usize>>, trials: usize) -> Result<Self> {
        if counts.len() != authors.len()
            || counts.iter().any(|r| r.len() != authors.len() || r.iter().sum::<usize>() != trials)
        {
            return Err(Error::Invalid("confusion counts do not match authors and trials".into()));
        }
        let floor = (1.0 / (trials as f64 + 1.0)).log10();
        let log10 = counts
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&c| if c == 0 { floor } else { (c as f64 / trials as f64).log10() })
                    .collect()
            })
            .collect();
        Ok(ConfusionMatrix {
            authors,
            trials,
            floor,
            counts,
            log10,
        })
    }
}

/// Test-set score of one (author, model kind, segmentation seed) model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedScore {
    pub author_id: String,
    pub model_kind: ModelKind,
    pub seed: u64,
    pub score: SentenceScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerplexityResult {
    pub author_id: String,
    pub model_kind: ModelKind,
    pub mean_ppl: f64,
    pub std_ppl: f64,
    /// Summed over seeds.
    pub n_scored_words: usize,
    pub per_seed: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerplexityTable {
    pub kinds: Vec<ModelKind>,
    pub authors: Vec<String>,
    /// `cells[author][kind]`
    pub cells: Vec<Vec<PerplexityResult>>,
    /// Per kind: (mean of author means, mean of author stds).
    pub average: Vec<(f64, f64)>,
}

/// Arranges per-seed test scores into an author × model-kind table.
///
/// Every (author, kind) must have been evaluated on the same seed set, so all
/// cells average over the same segmentations.
pub fn compare_models(records: &[SeedScore]) -> Result<PerplexityTable> {
    if records.is_empty() {
        return Err(Error::Empty("perplexity records"));
    }
    let mut grid: BTreeMap<&str, BTreeMap<ModelKind, BTreeMap<u64, SentenceScore>>> = BTreeMap::new();
    for r in records {
        let seeds = grid
            .entry(&r.author_id)
            .or_default()
            .entry(r.model_kind)
            .or_default();
        if seeds.insert(r.seed, r.score).is_some() {
            return Err(Error::Invalid(format!(
                "duplicate record for {} {} seed {}",
                r.author_id, r.model_kind, r.seed
            )));
        }
    }
    let kinds: Vec<ModelKind> = records
        .iter()
        .map(|r| r.model_kind)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let reference_seeds: Vec<u64> = grid.values().next().unwrap().values().next().unwrap().keys().copied().collect();

    let mut cells = Vec::with_capacity(grid.len());
    for (author, by_kind) in &grid {
        let mut row = Vec::with_capacity(kinds.len());
        for kind in &kinds {
            let seeds = by_kind
                .get(kind)
                .ok_or_else(|| Error::Invalid(format!("{author}: no {kind} results")))?;
            if !seeds.keys().copied().eq(reference_seeds.iter().copied()) {
                return Err(Error::Invalid(format!(
                    "{author} {kind}: segmentation seeds differ from other cells"
                )));
            }
            let per_seed = seeds
                .values()
                .map(|&s| score_perplexity(s))
                .collect::<Result<Vec<_>>>()?;
            let (mean_ppl, std_ppl) = mean_std(&per_seed);
            row.push(PerplexityResult {
                author_id: (*author).to_owned(),
                model_kind: *kind,
                mean_ppl,
                std_ppl,
                n_scored_words: seeds.values().map(|s| s.n_scored).sum(),
                per_seed,
            });
        }
        cells.push(row);
    }
    let average = (0..kinds.len())
        .map(|k| {
            let means: Vec<f64> = cells.iter().map(|r| r[k].mean_ppl).collect();
            let stds: Vec<f64> = cells.iter().map(|r| r[k].std_ppl).collect();
            (mean_std(&means).0, mean_std(&stds).0)
        })
        .collect();
    Ok(PerplexityTable {
        kinds,
        authors: grid.keys().map(|a| (*a).to_owned()).collect(),
        cells,
        average,
    })
}

pub fn format_mean_std(mean: f64, std: f64) -> String {
    format!("{mean:.1} ± {std:.1}")
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

impl PerplexityTable {
    pub fn average_of(&self, kind: ModelKind) -> Option<f64> {
        let k = self.kinds.iter().position(|&x| x == kind)?;
        Some(self.average[k].0)
    }

    /// Average NNLM perplexity reduction against the 4-gram baseline.
    pub fn ppl_reduction_pct(&self) -> Option<f64> {
        Some(reduction_pct(
            self.average_of(ModelKind::Ngram(4))?,
            self.average_of(ModelKind::Nnlm)?,
        ))
    }

    /// Authors as rows, kinds as columns, "mean ± std" cells and an `Avg` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("author");
        for k in &self.kinds {
            out.push(',');
            out.push_str(&k.to_string());
        }
        out.push('\n');
        for (author, row) in self.authors.iter().zip(&self.cells) {
            out.push_str(&csv_field(author));
            for c in row {
                out.push(',');
                out.push_str(&format_mean_std(c.mean_ppl, c.std_ppl));
            }
            out.push('\n');
        }
        out.push_str(AVERAGE_LABEL);
        for &(m, s) in &self.average {
            out.push(',');
            out.push_str(&format_mean_std(m, s));
        }
        out.push('\n');
        out
    }
}
