use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use authorlm::corpus::SplitLabel;
use authorlm::eval::{
    accuracy_curve, compare_models, confusion_matrix, mean_std, AccuracyCurve, AliasGroups, ConfusionMatrix,
    ModelKind, PerplexityTable, ScoreTable, SeedScore, TestPool,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::layout::{self, Layout, ACCURACY_CSV, CONFUSION_CSV, PERPLEXITY_CSV, SUMMARY_JSON, TRIALS_JSON};
use crate::models::LoadedModel;
use crate::train::load_encoded;

/// Trial seed for one segmentation, so different segmentations draw
/// different sentences.
pub fn trial_seed(eval_seed: u64, segmentation: u64) -> u64 {
    eval_seed ^ segmentation.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Test sentences of one author under one segmentation that have a full
/// context window, so every model kind scores the same positions.
pub fn test_pool(stems: &[Vec<String>], labels: &[SplitLabel], min_len: usize) -> Vec<Vec<String>> {
    stems
        .iter()
        .zip(labels)
        .filter(|(s, &l)| l == SplitLabel::Test && s.len() >= min_len)
        .map(|(s, _)| s.clone())
        .collect()
}

struct SeedKindResult {
    seed: u64,
    kind: ModelKind,
    scores: Vec<SeedScore>,
    curve: AccuracyCurve,
    confusion: ConfusionMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub authors: Vec<String>,
    pub seeds: Vec<u64>,
    pub kinds: Vec<ModelKind>,
    pub alias_groups: Vec<Vec<String>>,
    /// Words before this position in a sentence are context only.
    pub first_scored_position: usize,
    pub avg_perplexity: BTreeMap<ModelKind, MeanStd>,
    pub ppl_reduction_pct: Option<f64>,
    /// Averaged curve (aliased authors left out), by kind and sentence count.
    pub avg_accuracy: BTreeMap<ModelKind, BTreeMap<usize, f64>>,
    pub skipped: BTreeMap<ModelKind, Vec<String>>,
    pub perplexity_table: PerplexityTable,
}

#[derive(Debug, Clone, Serialize)]
struct TrialBlock {
    seed: u64,
    author: String,
    n_sentences: usize,
    /// Per trial, row indices into the author's test pool.
    sentences: Vec<Vec<usize>>,
    /// Per kind, the predicted author of each trial.
    predicted: BTreeMap<ModelKind, Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
struct TrialLog {
    trials_per_point: usize,
    blocks: Vec<TrialBlock>,
}

/// Outputs of one evaluation, already rendered.
pub struct Report {
    pub summary: Summary,
    pub perplexity_csv: String,
    pub accuracy_csv: String,
    pub confusion_csv: String,
}

fn evaluate_seed_kind(
    cfg: &ExperimentConfig,
    layout: &Layout,
    pools_text: &BTreeMap<String, Vec<Vec<String>>>,
    seed: u64,
    kind: ModelKind,
) -> Result<SeedKindResult> {
    let models = layout.models();
    let loaded = cfg
        .author_ids()
        .par_iter()
        .map(|a| LoadedModel::load(&models, a, seed, kind))
        .collect::<Result<Vec<_>>>()?;
    let candidates: Vec<_> = loaded.iter().map(LoadedModel::candidate).collect();
    let first = cfg.max_order() - 1;
    let mut pools = Vec::with_capacity(loaded.len());
    let mut scores = Vec::with_capacity(loaded.len());
    for (author, text) in pools_text {
        let table = ScoreTable::build(text, &candidates, first)?;
        let own = table.candidates().iter().position(|c| c == author).expect("author is a candidate");
        let all: Vec<usize> = (0..table.len()).collect();
        scores.push(SeedScore {
            author_id: author.clone(),
            model_kind: kind,
            seed,
            score: table.totals(&all)[own],
        });
        pools.push(TestPool {
            author_id: author.clone(),
            table,
        });
    }
    let ev = &cfg.eval;
    let aliases = AliasGroups(cfg.alias_groups.clone());
    let tseed = trial_seed(ev.seed, seed);
    let curve = accuracy_curve(&pools, &aliases, ev.s_min..=ev.s_max, ev.trials, tseed)?;
    let confusion = confusion_matrix(&pools, ev.confusion_trials, tseed)?;
    Ok(SeedKindResult {
        seed,
        kind,
        scores,
        curve,
        confusion,
    })
}

fn accuracy_csv(results: &[SeedKindResult], kinds: &[ModelKind]) -> String {
    // (kind, author, n) -> per-seed (mean, std); Avg sorts after the authors
    type Key = (ModelKind, bool, String, usize);
    let mut acc: BTreeMap<Key, Vec<(f64, f64)>> = BTreeMap::new();
    for r in results {
        let points = r.curve.points.iter().map(|p| (false, p)).chain(r.curve.average.iter().map(|p| (true, p)));
        for (avg, p) in points {
            acc.entry((r.kind, avg, p.author_id.clone(), p.n_sentences))
                .or_default()
                .push((p.mean, p.std));
        }
    }
    let mut out = String::from("author,model_kind,n_sentences,mean,std,seg_std\n");
    for kind in kinds {
        for ((k, _, author, n), v) in acc.range((*kind, false, String::new(), 0)..) {
            if k != kind {
                break;
            }
            let means: Vec<f64> = v.iter().map(|x| x.0).collect();
            let stds: Vec<f64> = v.iter().map(|x| x.1).collect();
            let (mean, seg_std) = mean_std(&means);
            let std = mean_std(&stds).0;
            out.push_str(&format!("{author},{kind},{n},{mean:.6},{std:.6},{seg_std:.6}\n"));
        }
    }
    out
}

fn confusion_csv(matrices: &BTreeMap<ModelKind, ConfusionMatrix>) -> String {
    let mut out = String::from("model_kind,true,predicted,log10_prob,count\n");
    for (kind, cm) in matrices {
        for (i, t) in cm.authors.iter().enumerate() {
            for (j, p) in cm.authors.iter().enumerate() {
                out.push_str(&format!("{kind},{t},{p},{:.6},{}\n", cm.log10[i][j], cm.counts[i][j]));
            }
        }
    }
    out
}

/// Confusion counts summed over segmentations.
fn pooled_confusion(results: &[SeedKindResult]) -> Result<BTreeMap<ModelKind, ConfusionMatrix>> {
    let mut by_kind: BTreeMap<ModelKind, (Vec<String>, Vec<Vec<usize>>, usize)> = BTreeMap::new();
    for r in results {
        let cm = &r.confusion;
        let e = by_kind
            .entry(r.kind)
            .or_insert_with(|| (cm.authors.clone(), vec![vec![0; cm.authors.len()]; cm.authors.len()], 0));
        if e.0 != cm.authors {
            bail!("confusion matrices disagree on authors");
        }
        for (acc, row) in e.1.iter_mut().zip(&cm.counts) {
            for (a, c) in acc.iter_mut().zip(row) {
                *a += c;
            }
        }
        e.2 += cm.trials;
    }
    by_kind
        .into_iter()
        .map(|(k, (authors, counts, trials))| Ok((k, ConfusionMatrix::from_counts(authors, counts, trials)?)))
        .collect()
}

fn trial_log(results: &[SeedKindResult], trials: usize) -> TrialLog {
    let mut blocks: BTreeMap<(u64, String, usize), TrialBlock> = BTreeMap::new();
    for r in results {
        for rec in &r.curve.log {
            let b = blocks
                .entry((r.seed, rec.true_author.clone(), rec.n_sentences))
                .or_insert_with(|| TrialBlock {
                    seed: r.seed,
                    author: rec.true_author.clone(),
                    n_sentences: rec.n_sentences,
                    sentences: Vec::new(),
                    predicted: BTreeMap::new(),
                });
            let preds = b.predicted.entry(r.kind).or_default();
            if preds.len() == b.sentences.len() {
                b.sentences.push(rec.sentences.clone());
            }
            preds.push(rec.predicted_author.clone());
        }
    }
    TrialLog {
        trials_per_point: trials,
        blocks: blocks.into_values().collect(),
    }
}

fn warn_on_order_trend(table: &PerplexityTable) {
    let col = |k: usize| table.kinds.iter().position(|&x| x == ModelKind::Ngram(k));
    let orders: Vec<(usize, usize)> = (1..=3).filter_map(|k| col(k).map(|c| (k, c))).collect();
    for (author, row) in table.authors.iter().zip(&table.cells) {
        for w in orders.windows(2) {
            let (lo, hi) = (&row[w[0].1], &row[w[1].1]);
            if hi.mean_ppl > lo.mean_ppl {
                log::warn!(
                    "{author}: order-{} perplexity {:.2} above order-{} {:.2}",
                    w[1].0,
                    hi.mean_ppl,
                    w[0].0,
                    lo.mean_ppl
                );
            }
        }
    }
}

/// Scores every author's test sentences under every candidate model and
/// writes the perplexity table, accuracy curves, confusion matrices, the
/// summary and the trial log.
pub fn run(cfg: &ExperimentConfig, layout: &Layout) -> Result<Report> {
    let authors = cfg.author_ids();
    let kinds = cfg.kinds();
    let min_len = cfg.max_order();
    let mut stems = BTreeMap::new();
    for a in &authors {
        let path = layout.stems(a);
        if !path.exists() {
            bail!("missing {} (run prepare first)", path.display());
        }
        let s: Vec<Vec<String>> = layout::read_json(&path)?;
        stems.insert(a.clone(), s);
    }

    let mut results = Vec::new();
    for &seed in &cfg.seeds {
        let mut pools_text = BTreeMap::new();
        for a in &authors {
            let corpus = load_encoded(layout, a, seed)?;
            if corpus.split_labels.len() != stems[a].len() {
                bail!("prepared files for {a} are out of step; rerun prepare");
            }
            pools_text.insert(a.clone(), test_pool(&stems[a], &corpus.split_labels, min_len));
        }
        for &kind in &kinds {
            let r = evaluate_seed_kind(cfg, layout, &pools_text, seed, kind)
                .with_context(|| format!("evaluating seed {seed}, kind {kind}"))?;
            results.push(r);
        }
    }

    let scores: Vec<SeedScore> = results.iter().flat_map(|r| r.scores.iter().cloned()).collect();
    let table = compare_models(&scores)?;
    warn_on_order_trend(&table);
    let confusion = pooled_confusion(&results)?;

    let mut avg_accuracy: BTreeMap<ModelKind, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    let mut skipped: BTreeMap<ModelKind, Vec<String>> = BTreeMap::new();
    for r in &results {
        for p in &r.curve.average {
            avg_accuracy.entry(r.kind).or_default().entry(p.n_sentences).or_default().push(p.mean);
        }
        let s = skipped.entry(r.kind).or_default();
        for a in &r.curve.skipped {
            if !s.contains(a) {
                s.push(a.clone());
            }
        }
    }
    let summary = Summary {
        authors: authors.clone(),
        seeds: cfg.seeds.clone(),
        kinds: kinds.clone(),
        alias_groups: cfg.alias_groups.clone(),
        first_scored_position: min_len - 1,
        avg_perplexity: table
            .kinds
            .iter()
            .zip(&table.average)
            .map(|(&k, &(mean, std))| (k, MeanStd { mean, std }))
            .collect(),
        ppl_reduction_pct: table.ppl_reduction_pct(),
        avg_accuracy: avg_accuracy
            .into_iter()
            .map(|(k, by_n)| (k, by_n.into_iter().map(|(n, v)| (n, mean_std(&v).0)).collect()))
            .collect(),
        skipped,
        perplexity_table: table.clone(),
    };
    let report = Report {
        perplexity_csv: table.to_csv(),
        accuracy_csv: accuracy_csv(&results, &kinds),
        confusion_csv: confusion_csv(&confusion),
        summary,
    };
    layout::write(&layout.report(PERPLEXITY_CSV), &report.perplexity_csv)?;
    layout::write(&layout.report(ACCURACY_CSV), &report.accuracy_csv)?;
    layout::write(&layout.report(CONFUSION_CSV), &report.confusion_csv)?;
    layout::write_json(&layout.report(SUMMARY_JSON), &report.summary)?;
    let log = serde_json::to_string(&trial_log(&results, cfg.eval.trials))? + "\n";
    layout::write(&layout.report(TRIALS_JSON), log)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_keeps_full_window_test_sentences() {
        let s = |n: usize| vec!["w".to_string(); n];
        let stems = vec![s(5), s(2), s(4), s(6)];
        let labels = [SplitLabel::Test, SplitLabel::Test, SplitLabel::Train, SplitLabel::Test];
        let pool = test_pool(&stems, &labels, 4);
        assert_eq!(pool.iter().map(Vec::len).collect::<Vec<_>>(), vec![5, 6]);
    }

    #[test]
    fn trial_seeds_differ_by_segmentation() {
        assert_ne!(trial_seed(0, 1), trial_seed(0, 2));
        assert_eq!(trial_seed(5, 3), trial_seed(5, 3));
    }
}
