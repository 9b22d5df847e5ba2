//! Command-line pipeline: prepare corpora, train per-author models, search
//! NNLM hyperparameters, evaluate and classify.
//!
//! Everything the binary does is reachable through [`run`], so tests can drive
//! the pipeline in-process.

pub mod classify;
pub mod config;
pub mod evaluate;
pub mod failure;
pub mod layout;
pub mod models;
pub mod prepare;
pub mod train;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use authorlm::eval::ModelKind;
use clap::{Parser, Subcommand};

use config::{ExperimentConfig, EFFECTIVE_CONFIG};
use failure::{Failure, UsageError, EXIT_OK, EXIT_USAGE};
use layout::Layout;

#[derive(Debug, Parser)]
#[command(name = "authorlm", version, about = "Authorship attribution with per-author language models")]
pub struct Cli {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `out_dir` from the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment, stem and encode every author's corpus for each seed.
    Prepare,
    /// Train every (author, seed, model kind) unit.
    Train {
        /// Run the hyperparameter search first and train with its choice.
        #[arg(long)]
        search: bool,
    },
    /// Search NNLM hyperparameters per author.
    Search,
    /// Write perplexity table, accuracy curves, confusion matrices and summary.
    Evaluate,
    /// Attribute a text to one of the trained authors.
    Classify {
        /// Text file; `-` or nothing reads stdin.
        input: Option<PathBuf>,
        /// Models directory (default: `<out>/models`).
        #[arg(long)]
        models: Option<PathBuf>,
        /// `nnlm` or `ngram-<k>`.
        #[arg(long, default_value = "nnlm")]
        kind: ModelKind,
        /// Segmentation seed of the models (default: smallest available).
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| UsageError("this command needs --config".into()))?;
    let mut cfg = ExperimentConfig::load(path).map_err(|e| UsageError(format!("{e:#}")))?;
    if let Some(out) = &cli.out {
        cfg.out_dir = std::path::absolute(out)?;
    }
    let layout = Layout::new(&cfg.out_dir);
    layout::write(&layout.root().join(EFFECTIVE_CONFIG), cfg.to_toml()?)?;
    Ok(cfg)
}

fn out_dir(cli: &Cli) -> Result<PathBuf> {
    if let Some(out) = &cli.out {
        return Ok(out.clone());
    }
    match &cli.config {
        Some(p) => Ok(ExperimentConfig::load(p).map_err(|e| UsageError(format!("{e:#}")))?.out_dir),
        None => Ok(PathBuf::from("out")),
    }
}

fn execute(cli: &Cli, stdin: &mut (dyn Read + Send), stdout: &mut (dyn Write + Send)) -> Result<()> {
    match &cli.command {
        Command::Prepare => {
            let cfg = load_config(cli)?;
            let layout = Layout::new(&cfg.out_dir);
            let stats = prepare::run(&cfg, &layout)?;
            if cli.json {
                writeln!(stdout, "{}", serde_json::to_string_pretty(&stats)?)?;
            } else {
                write!(stdout, "{}", prepare::stats_csv(&stats)?)?;
            }
        }
        Command::Train { search } => {
            let cfg = load_config(cli)?;
            let layout = Layout::new(&cfg.out_dir);
            let tuned = if *search { train::search(&cfg, &layout)? } else { Default::default() };
            let n = train::run(&cfg, &layout, &tuned)?;
            writeln!(stdout, "trained {n} models in {}", layout.models().display())?;
        }
        Command::Search => {
            let cfg = load_config(cli)?;
            let layout = Layout::new(&cfg.out_dir);
            let chosen = train::search(&cfg, &layout)?;
            if cli.json {
                writeln!(stdout, "{}", serde_json::to_string_pretty(&chosen)?)?;
            } else {
                for c in chosen.values() {
                    let n = &c.nnlm;
                    writeln!(
                        stdout,
                        "{}: emb {} hidden {} lr {} momentum {} batch {} (valid ppl {:.2})",
                        c.author_id, n.emb_dim, n.hidden_dim, n.learning_rate, n.momentum, n.batch_size, c.valid_ppl
                    )?;
                }
            }
        }
        Command::Evaluate => {
            let cfg = load_config(cli)?;
            let layout = Layout::new(&cfg.out_dir);
            let report = evaluate::run(&cfg, &layout)?;
            if cli.json {
                writeln!(stdout, "{}", serde_json::to_string_pretty(&report.summary)?)?;
            } else {
                write!(stdout, "{}", report.perplexity_csv)?;
                if let Some(p) = report.summary.ppl_reduction_pct {
                    writeln!(stdout, "nnlm vs ngram-4 perplexity reduction: {p:.2}%")?;
                }
            }
        }
        Command::Classify {
            input,
            models,
            kind,
            seed,
        } => {
            let models = match models {
                Some(m) => m.clone(),
                None => out_dir(cli)?.join("models"),
            };
            let text = match input {
                Some(p) if p.as_os_str() != "-" => {
                    std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?
                }
                _ => {
                    let mut s = String::new();
                    stdin.read_to_string(&mut s).context("reading stdin")?;
                    s
                }
            };
            let out = classify::run(&models, *kind, *seed, &text)?;
            if cli.json {
                writeln!(stdout, "{}", serde_json::to_string_pretty(&out)?)?;
            } else {
                write!(stdout, "{}", classify::render_table(&out))?;
            }
        }
    }
    Ok(())
}

/// Runs one parsed command line.
pub fn run(cli: &Cli, stdin: &mut (dyn Read + Send), stdout: &mut (dyn Write + Send)) -> Result<(), Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(Failure {
                code: EXIT_USAGE,
                message: "--jobs must be at least 1".into(),
            });
        }
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| Failure::from(anyhow::Error::new(e)))?;
    pool.install(|| execute(cli, stdin, stdout)).map_err(Failure::from)
}

/// Parses `args` (program name first), runs, reports errors on stderr and
/// returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli, &mut std::io::stdin(), &mut std::io::stdout()) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
