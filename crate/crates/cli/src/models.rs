use std::path::Path;

use anyhow::{bail, Context, Result};
use authorlm::corpus::Vocabulary;
use authorlm::eval::{Candidate, ModelKind};
use authorlm::ngram::NgramModel;
use authorlm::{LanguageModel, Nnlm};

use crate::layout::{self, model_file, vocab_file, VocabFile};

pub enum Model {
    Ngram(NgramModel),
    Nnlm(Nnlm),
}

impl Model {
    pub fn as_lm(&self) -> &dyn LanguageModel {
        match self {
            Model::Ngram(m) => m,
            Model::Nnlm(m) => m,
        }
    }
}

/// One author's trained model of one kind and seed, with its vocabulary.
pub struct LoadedModel {
    pub author_id: String,
    pub vocab: Vocabulary,
    pub model: Model,
}

impl LoadedModel {
    pub fn load(models: &Path, author: &str, seed: u64, kind: ModelKind) -> Result<Self> {
        let path = model_file(models, author, seed, kind);
        if !path.exists() {
            bail!("missing model {} (run train first)", path.display());
        }
        let vf: VocabFile = layout::read_json(&vocab_file(models, author, seed))?;
        let vocab = vf.vocabulary()?;
        let text = layout::read(&path)?;
        let model = match kind {
            ModelKind::Ngram(order) => {
                let m = NgramModel::from_json(&text).with_context(|| format!("loading {}", path.display()))?;
                if m.order() != order {
                    bail!("{} holds an order-{} model", path.display(), m.order());
                }
                Model::Ngram(m)
            }
            ModelKind::Nnlm => Model::Nnlm(Nnlm::from_json(&text).with_context(|| format!("loading {}", path.display()))?),
        };
        if model.as_lm().vocab_size() != vocab.len() {
            bail!("{}: model and vocabulary sizes differ", path.display());
        }
        Ok(LoadedModel {
            author_id: author.to_owned(),
            vocab,
            model,
        })
    }

    pub fn candidate(&self) -> Candidate<'_> {
        Candidate {
            author_id: self.author_id.clone(),
            model: self.model.as_lm(),
            vocab: &self.vocab,
        }
    }
}
