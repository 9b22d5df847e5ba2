use std::path::Path;

use anyhow::{bail, Context, Result};
use authorlm::corpus::{prepare_document, RawDocument};
use authorlm::eval::{classify, ClassificationTrial, ModelKind};
use serde::Serialize;

use crate::models::LoadedModel;

/// Author directories under a models directory, sorted.
pub fn model_authors(models: &Path) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(models).with_context(|| format!("listing {}", models.display()))? {
        let entry = entry?;
        if entry.file_type()?.is_dir() {
            out.push(entry.file_name().to_string_lossy().into_owned());
        }
    }
    out.sort();
    Ok(out)
}

/// Smallest segmentation seed every author has a model for.
pub fn common_seed(models: &Path, authors: &[String]) -> Result<u64> {
    let mut common: Option<std::collections::BTreeSet<u64>> = None;
    for a in authors {
        let mut seeds = std::collections::BTreeSet::new();
        for entry in std::fs::read_dir(models.join(a))? {
            let name = entry?.file_name().to_string_lossy().into_owned();
            if let Some(s) = name.strip_prefix("seed-").and_then(|s| s.parse().ok()) {
                seeds.insert(s);
            }
        }
        common = Some(match common {
            None => seeds,
            Some(c) => c.intersection(&seeds).copied().collect(),
        });
    }
    common
        .and_then(|c| c.into_iter().next())
        .context("no segmentation seed shared by all authors")
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyOutput {
    pub prediction: String,
    pub tie: bool,
    pub kind: ModelKind,
    pub seed: u64,
    pub n_sentences: usize,
    /// Candidates from lowest to highest perplexity.
    pub perplexities: Vec<RankedCandidate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankedCandidate {
    pub author_id: String,
    pub perplexity: Option<f64>,
}

/// Attributes raw text to one of the authors with models in `models`.
pub fn run(models: &Path, kind: ModelKind, seed: Option<u64>, text: &str) -> Result<ClassifyOutput> {
    let authors = model_authors(models)?;
    if authors.len() < 2 {
        bail!("{} holds models for {} author(s), need 2", models.display(), authors.len());
    }
    let seed = match seed {
        Some(s) => s,
        None => common_seed(models, &authors)?,
    };
    let stems = if text.trim().is_empty() {
        Vec::new()
    } else {
        prepare_document(&RawDocument::new("input", text)?).stems
    };
    if stems.is_empty() {
        return Err(authorlm::Error::NoScoreableWords).context("input has no words");
    }
    let loaded = authors
        .iter()
        .map(|a| LoadedModel::load(models, a, seed, kind))
        .collect::<Result<Vec<_>>>()?;
    let candidates: Vec<_> = loaded.iter().map(LoadedModel::candidate).collect();
    let trial: ClassificationTrial = classify(&stems, &candidates)?;
    Ok(ClassifyOutput {
        prediction: trial.predicted_author.clone(),
        tie: trial.tie,
        kind,
        seed,
        n_sentences: trial.n_sentences,
        perplexities: trial
            .ranked()
            .into_iter()
            .map(|c| RankedCandidate {
                author_id: c.author_id.clone(),
                perplexity: c.perplexity,
            })
            .collect(),
    })
}

pub fn render_table(out: &ClassifyOutput) -> String {
    let width = out.perplexities.iter().map(|c| c.author_id.len()).max().unwrap_or(6).max(6);
    let mut s = format!(
        "prediction: {}{}\n{:<4}  {:<width$}  perplexity\n",
        out.prediction,
        if out.tie { " (tie)" } else { "" },
        "rank",
        "author"
    );
    for (i, c) in out.perplexities.iter().enumerate() {
        let p = c.perplexity.map_or("-".to_string(), |p| format!("{p:.3}"));
        s.push_str(&format!("{:<4}  {:<width$}  {p}\n", i + 1, c.author_id));
    }
    s
}
