//! Where every artifact lives under the output directory.
//!
//! ```text
//! out/
//!   effective_config.toml
//!   prepared/stats.csv
//!   prepared/<author>/stems.json
//!   prepared/<author>/seed-<s>.json
//!   models/<author>/seed-<s>/{vocab.json, ngram-<k>.json, ngram-<k>.arpa, nnlm.json, nnlm_history.json}
//!   search/<author>_{trace.csv, timing.csv, best.json}
//!   perplexity_table.csv  accuracy_curve.csv  confusion.csv  summary.json  trials.json
//! ```

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use authorlm::corpus::Vocabulary;
use authorlm::eval::ModelKind;
use serde::{Deserialize, Serialize};

pub const STATS_CSV: &str = "stats.csv";
pub const PERPLEXITY_CSV: &str = "perplexity_table.csv";
pub const ACCURACY_CSV: &str = "accuracy_curve.csv";
pub const CONFUSION_CSV: &str = "confusion.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const TRIALS_JSON: &str = "trials.json";

#[derive(Debug, Clone)]
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Layout { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn prepared(&self) -> PathBuf {
        self.root.join("prepared")
    }

    pub fn stats_csv(&self) -> PathBuf {
        self.prepared().join(STATS_CSV)
    }

    pub fn stems(&self, author: &str) -> PathBuf {
        self.prepared().join(author).join("stems.json")
    }

    pub fn encoded(&self, author: &str, seed: u64) -> PathBuf {
        self.prepared().join(author).join(format!("seed-{seed}.json"))
    }

    pub fn models(&self) -> PathBuf {
        self.root.join("models")
    }

    pub fn search(&self) -> PathBuf {
        self.root.join("search")
    }

    pub fn report(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }
}

/// Model files of one author and seed, relative to a models directory.
pub fn model_dir(models: &Path, author: &str, seed: u64) -> PathBuf {
    models.join(author).join(format!("seed-{seed}"))
}

pub fn model_file(models: &Path, author: &str, seed: u64, kind: ModelKind) -> PathBuf {
    model_dir(models, author, seed).join(format!("{kind}.json"))
}

pub fn vocab_file(models: &Path, author: &str, seed: u64) -> PathBuf {
    model_dir(models, author, seed).join("vocab.json")
}

/// The vocabulary a model was trained with, stored next to it so a models
/// directory is self-contained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabFile {
    pub author_id: String,
    pub seed: u64,
    pub vocab: Vec<String>,
    pub oov_index: usize,
}

impl VocabFile {
    pub fn vocabulary(&self) -> Result<Vocabulary> {
        Ok(Vocabulary::from_entries(self.vocab.clone(), self.oov_index)?)
    }
}

pub fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(path, text)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = read(path)?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
