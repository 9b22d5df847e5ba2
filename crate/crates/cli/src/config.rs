//! Experiment configuration, read from TOML.
//!
//! Relative paths are resolved against the directory of the config file.
//! [`ExperimentConfig::resolve`] fills in every default, expands
//! `corpus_dir` into explicit authors and makes paths absolute; the result is
//! what gets echoed into the output directory as `effective_config.toml`.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use authorlm::hypersearch::SearchSpace;
use authorlm::ngram::MAX_ORDER;
use authorlm::nnlm::NnlmConfig;
use serde::{Deserialize, Serialize};

pub const EFFECTIVE_CONFIG: &str = "effective_config.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuthorSource {
    pub id: String,
    pub paths: Vec<PathBuf>,
    /// Treat each line as one sentence-like phrase instead of running text.
    #[serde(default)]
    pub phrase_per_line: bool,
}

/// NNLM settings shared by every author; the vocabulary size comes from each
/// author's corpus and the predicted word is always the last of the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NnlmSection {
    pub context_size: usize,
    pub emb_dim: usize,
    pub hidden_dim: usize,
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub decay_start_epoch: usize,
    pub decay_factor: f64,
    pub init_seed: u64,
    pub init_std: f64,
}

impl Default for NnlmSection {
    fn default() -> Self {
        let d = NnlmConfig::default();
        NnlmSection {
            context_size: d.context_size,
            emb_dim: d.emb_dim,
            hidden_dim: d.hidden_dim,
            batch_size: d.batch_size,
            epochs: d.epochs,
            learning_rate: d.learning_rate,
            momentum: d.momentum,
            decay_start_epoch: d.decay_start_epoch,
            decay_factor: d.decay_factor,
            init_seed: d.init_seed,
            init_std: d.init_std,
        }
    }
}

impl NnlmSection {
    /// Model config for one author and segmentation seed.
    pub fn model_config(&self, vocab_size: usize, seed: u64) -> NnlmConfig {
        NnlmConfig {
            vocab_size,
            context_size: self.context_size,
            target_pos: self.context_size,
            emb_dim: self.emb_dim,
            hidden_dim: self.hidden_dim,
            batch_size: self.batch_size,
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            momentum: self.momentum,
            decay_start_epoch: self.decay_start_epoch,
            decay_factor: self.decay_factor,
            init_seed: self.init_seed.wrapping_mul(1_000_003).wrapping_add(seed),
            init_std: self.init_std,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSettings {
    pub s_min: usize,
    pub s_max: usize,
    pub trials: usize,
    pub confusion_trials: usize,
    pub seed: u64,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            s_min: 1,
            s_max: 20,
            trials: 100,
            confusion_trials: 100,
            seed: 0,
        }
    }
}

fn default_n_segmentations() -> usize {
    10
}

fn default_orders() -> Vec<usize> {
    (1..=MAX_ORDER).collect()
}

fn yes() -> bool {
    true
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    /// Every `*.txt` file directly inside is one author named after the file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus_dir: Option<PathBuf>,
    #[serde(default = "default_n_segmentations")]
    pub n_segmentations: usize,
    /// Segmentation seeds; `1..=n_segmentations` when empty.
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default = "default_orders")]
    pub ngram_orders: Vec<usize>,
    #[serde(default = "yes")]
    pub train_nnlm: bool,
    /// Also write each N-gram model in ARPA text format.
    #[serde(default)]
    pub export_arpa: bool,
    #[serde(default)]
    pub alias_groups: Vec<Vec<String>>,
    #[serde(default)]
    pub authors: Vec<AuthorSource>,
    #[serde(default)]
    pub nnlm: NnlmSection,
    #[serde(default)]
    pub search: SearchSpace,
    #[serde(default)]
    pub eval: EvalSettings,
}

fn absolute(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("parsing experiment config")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg = Self::from_toml(&text)?;
        let base = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default();
        let base = std::path::absolute(&base).unwrap_or(base);
        cfg.resolve(&base)
    }

    /// Defaults filled in, corpus directory expanded, paths absolute, then
    /// validated.
    pub fn resolve(mut self, base: &Path) -> Result<Self> {
        self.out_dir = absolute(base, &self.out_dir);
        for a in &mut self.authors {
            for p in &mut a.paths {
                *p = absolute(base, p);
            }
        }
        if let Some(dir) = self.corpus_dir.take() {
            let dir = absolute(base, &dir);
            let mut found = Vec::new();
            for entry in std::fs::read_dir(&dir).with_context(|| format!("listing {}", dir.display()))? {
                let path = entry?.path();
                if path.extension().is_some_and(|e| e == "txt") && path.is_file() {
                    let id = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                    found.push(AuthorSource {
                        id,
                        paths: vec![path],
                        phrase_per_line: false,
                    });
                }
            }
            found.sort_by(|a, b| a.id.cmp(&b.id));
            self.authors.extend(found);
        }
        if self.seeds.is_empty() {
            self.seeds = (1..=self.n_segmentations as u64).collect();
        }
        self.n_segmentations = self.seeds.len();
        self.ngram_orders.sort_unstable();
        self.ngram_orders.dedup();
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.authors.len() < 2 {
            bail!("at least 2 authors are required, found {}", self.authors.len());
        }
        let mut ids = BTreeSet::new();
        for a in &self.authors {
            if a.id.is_empty() || a.id.contains(['/', '\\']) || a.id.starts_with('.') {
                bail!("author id {:?} is not usable as a directory name", a.id);
            }
            if !ids.insert(a.id.as_str()) {
                bail!("duplicate author id {:?}", a.id);
            }
            if a.paths.is_empty() {
                bail!("author {} has no corpus paths", a.id);
            }
        }
        let seeds: BTreeSet<u64> = self.seeds.iter().copied().collect();
        if seeds.len() != self.seeds.len() {
            bail!("segmentation seeds must be distinct");
        }
        if self.seeds.is_empty() {
            bail!("at least one segmentation seed is required");
        }
        if let Some(bad) = self.ngram_orders.iter().find(|k| !(1..=MAX_ORDER).contains(k)) {
            bail!("n-gram order {bad} not in 1..={MAX_ORDER}");
        }
        if self.ngram_orders.is_empty() && !self.train_nnlm {
            bail!("no model kinds selected");
        }
        let mut seen = BTreeSet::new();
        for g in &self.alias_groups {
            if g.len() < 2 {
                bail!("alias group {g:?} needs at least two authors");
            }
            for a in g {
                if !ids.contains(a.as_str()) {
                    bail!("alias group names unknown author {a:?}");
                }
                if !seen.insert(a) {
                    bail!("author {a:?} is in more than one alias group");
                }
            }
        }
        self.nnlm.model_config(2, 0).validate()?;
        self.search.validate()?;
        let e = &self.eval;
        if e.s_min == 0 || e.s_min > e.s_max || e.trials == 0 || e.confusion_trials == 0 {
            bail!("eval settings need 1 <= s_min <= s_max and positive trial counts");
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).context("serializing config")
    }

    /// Model kinds in report order: N-gram orders ascending, then the NNLM.
    pub fn kinds(&self) -> Vec<authorlm::eval::ModelKind> {
        use authorlm::eval::ModelKind;
        let mut k: Vec<ModelKind> = self.ngram_orders.iter().map(|&o| ModelKind::Ngram(o)).collect();
        if self.train_nnlm {
            k.push(ModelKind::Nnlm);
        }
        k
    }

    /// Largest scoring window over the selected kinds.
    pub fn max_order(&self) -> usize {
        self.kinds()
            .into_iter()
            .map(|k| k.order(self.nnlm.context_size))
            .max()
            .unwrap_or(1)
    }

    pub fn author_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.authors.iter().map(|a| a.id.clone()).collect();
        ids.sort();
        ids
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [[authors]]
        id = "a"
        paths = ["a.txt"]

        [[authors]]
        id = "b"
        paths = ["/abs/b.txt"]
    "#;

    #[test]
    fn defaults_resolve() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap().resolve(Path::new("/base")).unwrap();
        assert_eq!(cfg.seeds, (1..=10).collect::<Vec<_>>());
        assert_eq!(cfg.ngram_orders, vec![1, 2, 3, 4]);
        assert_eq!(cfg.out_dir, PathBuf::from("/base/out"));
        assert_eq!(cfg.authors[0].paths[0], PathBuf::from("/base/a.txt"));
        assert_eq!(cfg.authors[1].paths[0], PathBuf::from("/abs/b.txt"));
        assert_eq!(cfg.eval.s_max, 20);
        assert_eq!(cfg.max_order(), 4);
    }

    #[test]
    fn echo_round_trips() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap().resolve(Path::new("/base")).unwrap();
        let echoed = ExperimentConfig::from_toml(&cfg.to_toml().unwrap())
            .unwrap()
            .resolve(Path::new("/elsewhere"))
            .unwrap();
        assert_eq!(echoed, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let one = r#"
            [[authors]]
            id = "a"
            paths = ["a.txt"]
        "#;
        assert!(ExperimentConfig::from_toml(one).unwrap().resolve(Path::new("/")).is_err());
        let bad_order = format!("ngram_orders = [5]\n{MINIMAL}");
        assert!(ExperimentConfig::from_toml(&bad_order).unwrap().resolve(Path::new("/")).is_err());
        let dup_seed = format!("seeds = [1, 1]\n{MINIMAL}");
        assert!(ExperimentConfig::from_toml(&dup_seed).unwrap().resolve(Path::new("/")).is_err());
        let alias = format!("alias_groups = [[\"a\", \"zz\"]]\n{MINIMAL}");
        assert!(ExperimentConfig::from_toml(&alias).unwrap().resolve(Path::new("/")).is_err());
        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
    }
}
