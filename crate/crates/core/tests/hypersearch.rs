use std::sync::atomic::{AtomicUsize, Ordering};

use authorlm::corpus::encode_and_split;
use authorlm::corpus::{build_vocabulary, prepare_document};
use authorlm::hypersearch::{search, search_with, Range, SearchSpace};
use authorlm::nnlm::NnlmConfig;
use authorlm::synth::{author_corpora, SynthConfig};
use authorlm::Error;

/// A smooth bowl over the five axes with its minimum inside the space.
fn bowl(cfg: &NnlmConfig) -> authorlm::Result<f64> {
    let d = |x: f64, best: f64| (x / best).ln().powi(2);
    Ok(50.0
        + d(cfg.emb_dim as f64, 60.0)
        + d(cfg.hidden_dim as f64, 300.0)
        + d(cfg.learning_rate, 0.12)
        + d(cfg.momentum, 0.9) * 100.0
        + d(cfg.batch_size as f64, 150.0))
}

fn point_space(cfg: &NnlmConfig) -> SearchSpace {
    let at = |x: f64| Range::new(x, x);
    SearchSpace {
        emb_dim: at(cfg.emb_dim as f64),
        hidden_dim: at(cfg.hidden_dim as f64),
        learning_rate: at(cfg.learning_rate),
        momentum: at(cfg.momentum),
        batch_size: at(cfg.batch_size as f64),
        ..SearchSpace::default()
    }
}

#[test]
fn collapsed_space_trains_once() {
    let base = NnlmConfig::default();
    let calls = AtomicUsize::new(0);
    let r = search_with(&point_space(&base), &base, |c| {
        calls.fetch_add(1, Ordering::SeqCst);
        bowl(c)
    })
    .unwrap();
    assert_eq!(calls.load(Ordering::SeqCst), 1);
    assert_eq!(r.trace.len(), 1);
    assert_eq!(r.best, base);
}

#[test]
fn two_stage_budget_and_best_of_trace() {
    let space = SearchSpace::default();
    let calls = AtomicUsize::new(0);
    let r = search_with(&space, &NnlmConfig::default(), |c| {
        calls.fetch_add(1, Ordering::SeqCst);
        bowl(c)
    })
    .unwrap();
    let n = calls.load(Ordering::SeqCst);
    assert!(n <= 2 * 243);
    assert_eq!(r.trace.len(), n);
    assert_eq!(r.trace.iter().filter(|t| t.stage == 1).count(), 243);
    let min = r.trace.iter().map(|t| t.valid_ppl).fold(f64::INFINITY, f64::min);
    assert_eq!(r.best_ppl, min);
    assert_eq!(bowl(&r.best).unwrap(), min);
    // refinement gets closer to the optimum than the coarse grid
    let stage1 = r.trace.iter().filter(|t| t.stage == 1).map(|t| t.valid_ppl).fold(f64::INFINITY, f64::min);
    assert!(min < stage1);
    for t in &r.trace {
        let p = t.point;
        assert!((25..=200).contains(&p.emb_dim));
        assert!((100..=800).contains(&p.hidden_dim));
        assert!((0.05..=0.3).contains(&p.learning_rate));
        assert!((0.8..=0.99).contains(&p.momentum));
        assert!((100..=400).contains(&p.batch_size));
    }
}

#[test]
fn trace_is_reproducible() {
    let space = SearchSpace::default();
    let a = search_with(&space, &NnlmConfig::default(), bowl).unwrap();
    let b = search_with(&space, &NnlmConfig::default(), bowl).unwrap();
    assert_eq!(a.trace_csv(), b.trace_csv());
    assert_eq!(a.trace_csv().lines().count(), a.trace.len() + 1);
}

#[test]
fn refinement_stays_near_a_plateau_winner() {
    // more hidden units help up to 500, flat afterwards
    let landscape = |c: &NnlmConfig| Ok(100.0 - (c.hidden_dim.min(500) as f64) / 10.0 + c.emb_dim as f64 * 1e-3);
    let space = SearchSpace::default();
    let r = search_with(&space, &NnlmConfig::default(), landscape).unwrap();
    let coarse = r.trace.iter().filter(|t| t.stage == 1).min_by(|a, b| a.valid_ppl.total_cmp(&b.valid_ppl)).unwrap();
    let lower_edge = coarse.point.hidden_dim as f64 / 8f64.powf(0.25);
    assert!(r.best.hidden_dim as f64 >= lower_edge.floor());
    assert!(r.best.hidden_dim >= 500);
}

#[test]
fn diverged_points_score_infinity() {
    let space = SearchSpace {
        learning_rate: Range::new(0.05, 0.3),
        ..point_space(&NnlmConfig::default())
    };
    let r = search_with(&space, &NnlmConfig::default(), |c| {
        if c.learning_rate > 0.2 {
            Err(Error::TrainingDiverged { epoch: 1, iteration: 1 })
        } else {
            bowl(c)
        }
    })
    .unwrap();
    assert!(r.trace.iter().any(|t| t.valid_ppl.is_infinite()));
    assert!(r.best.learning_rate <= 0.2);
    let all_bad = search_with(&space, &NnlmConfig::default(), |_| Err(Error::Diverged));
    assert!(matches!(all_bad, Err(Error::Diverged)));
    let broken = search_with(&space, &NnlmConfig::default(), |_| Err(Error::NoScoreableWords));
    assert!(matches!(broken, Err(Error::NoScoreableWords)));
}

#[test]
fn searches_a_real_corpus() {
    let docs = author_corpora(&SynthConfig {
        n_authors: 1,
        sentences_per_author: 300,
        lexicon_size: 400,
        author_words: 150,
        phrases_per_author: 60,
        ..SynthConfig::default()
    })
    .unwrap();
    let prepared = prepare_document(&docs[0]);
    let vocab = build_vocabulary(&prepared.stems).unwrap();
    let corpus = encode_and_split("author01", &prepared.stems, &vocab, 1).unwrap();
    let base = NnlmConfig {
        epochs: 2,
        ..NnlmConfig::default()
    };
    let space = SearchSpace {
        emb_dim: Range::new(8.0, 16.0),
        hidden_dim: Range::new(16.0, 16.0),
        learning_rate: Range::new(0.3, 0.3),
        momentum: Range::new(0.9, 0.9),
        batch_size: Range::new(50.0, 50.0),
        points_per_axis: 2,
        ..SearchSpace::default()
    };
    let r = search(&corpus, &space, &base, 5).unwrap();
    assert!(r.trace.len() >= 2);
    assert_eq!(r.best.vocab_size, vocab.len());
    assert_eq!(r.best.init_seed, 5);
    assert!(r.best_ppl > 1.0 && r.best_ppl < vocab.len() as f64 * 1.5);
}
