use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use authorlm::corpus::{EncodedCorpus, SplitLabel};
use authorlm::eval::ModelKind;
use authorlm::hypersearch;
use authorlm::ngram::{count_ngrams, estimate_kneser_ney};
use authorlm::nnlm::train;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, NnlmSection};
use crate::layout::{self, model_dir, model_file, vocab_file, Layout, VocabFile};

pub fn load_encoded(layout: &Layout, author: &str, seed: u64) -> Result<EncodedCorpus> {
    let path = layout.encoded(author, seed);
    if !path.exists() {
        bail!("missing prepared corpus {} (run prepare first)", path.display());
    }
    let c = EncodedCorpus::from_json(&layout::read(&path)?).with_context(|| format!("loading {}", path.display()))?;
    if c.author_id != author || c.seed != seed {
        bail!("{} holds {} seed {}", path.display(), c.author_id, c.seed);
    }
    Ok(c)
}

/// Outcome of the per-author hyperparameter search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchChoice {
    pub author_id: String,
    pub seed: u64,
    pub valid_ppl: f64,
    pub nnlm: NnlmSection,
}

/// Searches NNLM hyperparameters for every author on the first segmentation
/// seed and writes the trace, timing and chosen settings.
pub fn search(cfg: &ExperimentConfig, layout: &Layout) -> Result<BTreeMap<String, SearchChoice>> {
    let seed = cfg.seeds[0];
    let mut out = BTreeMap::new();
    for author in cfg.author_ids() {
        let corpus = load_encoded(layout, &author, seed)?;
        let base = cfg.nnlm.model_config(corpus.vocab_size(), seed);
        let result = hypersearch::search(&corpus, &cfg.search, &base, base.init_seed)
            .with_context(|| format!("search for author {author}"))?;
        let dir = layout.search();
        layout::write(&dir.join(format!("{author}_trace.csv")), result.trace_csv())?;
        layout::write(&dir.join(format!("{author}_timing.csv")), result.timing_csv(&author))?;
        let b = &result.best;
        let choice = SearchChoice {
            author_id: author.clone(),
            seed,
            valid_ppl: result.best_ppl,
            nnlm: NnlmSection {
                emb_dim: b.emb_dim,
                hidden_dim: b.hidden_dim,
                learning_rate: b.learning_rate,
                momentum: b.momentum,
                batch_size: b.batch_size,
                ..cfg.nnlm.clone()
            },
        };
        layout::write_json(&dir.join(format!("{author}_best.json")), &choice)?;
        log::info!("{author}: best validation perplexity {:.2}", result.best_ppl);
        out.insert(author, choice);
    }
    Ok(out)
}

fn train_unit(
    cfg: &ExperimentConfig,
    layout: &Layout,
    corpus: &EncodedCorpus,
    kind: ModelKind,
    nnlm: &NnlmSection,
) -> Result<()> {
    let models = layout.models();
    let (author, seed) = (corpus.author_id.as_str(), corpus.seed);
    let path = model_file(&models, author, seed, kind);
    match kind {
        ModelKind::Ngram(order) => {
            let counts = count_ngrams(corpus.split(SplitLabel::Train), order, corpus.vocab_size())?;
            let model = estimate_kneser_ney(&counts);
            layout::write(&path, model.to_json()? + "\n")?;
            if cfg.export_arpa {
                layout::write(&path.with_extension("arpa"), model.to_arpa(Some(&corpus.vocab)))?;
            }
        }
        ModelKind::Nnlm => {
            let config = nnlm.model_config(corpus.vocab_size(), seed);
            let (model, history) = train::<f64>(corpus, &config)?;
            if history.stopped_early {
                log::info!("{author} seed {seed}: stopped early, best epoch {}", history.best_epoch);
            }
            layout::write(&path, model.to_json()? + "\n")?;
            layout::write_json(&model_dir(&models, author, seed).join("nnlm_history.json"), &history)?;
        }
    }
    Ok(())
}

/// Trains every (author, seed, kind) unit. `tuned` overrides the NNLM
/// settings per author.
pub fn run(cfg: &ExperimentConfig, layout: &Layout, tuned: &BTreeMap<String, SearchChoice>) -> Result<usize> {
    let kinds = cfg.kinds();
    let mut corpora = Vec::new();
    for author in cfg.author_ids() {
        for &seed in &cfg.seeds {
            corpora.push(load_encoded(layout, &author, seed)?);
        }
    }
    for c in &corpora {
        let vf = VocabFile {
            author_id: c.author_id.clone(),
            seed: c.seed,
            vocab: c.vocab.clone(),
            oov_index: c.oov_index,
        };
        layout::write_json(&vocab_file(&layout.models(), &c.author_id, c.seed), &vf)?;
    }
    let units: Vec<(&EncodedCorpus, ModelKind)> = corpora
        .iter()
        .flat_map(|c| kinds.iter().map(move |&k| (c, k)))
        .collect();
    units
        .par_iter()
        .map(|&(c, kind)| {
            let nnlm = tuned.get(&c.author_id).map_or(&cfg.nnlm, |t| &t.nnlm);
            train_unit(cfg, layout, c, kind, nnlm)
                .with_context(|| format!("author {}, seed {}, kind {kind}", c.author_id, c.seed))
        })
        .collect::<Result<Vec<()>>>()?;
    Ok(units.len())
}
