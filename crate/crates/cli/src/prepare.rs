use anyhow::{Context, Result};
use authorlm::corpus::{
    build_vocabulary, corpus_stats, encode_and_split, prepare_document, split_labels, CorpusStats, RawDocument,
    COVERAGE_KS,
};
use rayon::prelude::*;

use crate::config::{AuthorSource, ExperimentConfig};
use crate::layout::{self, Layout};

fn read_author(src: &AuthorSource) -> Result<RawDocument> {
    let mut text = String::new();
    for p in &src.paths {
        let part = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        if !text.is_empty() {
            text.push('\n');
        }
        text.push_str(&part);
    }
    let doc = if src.phrase_per_line {
        RawDocument::from_phrases(&src.id, &text)
    } else {
        RawDocument::new(&src.id, text)
    };
    Ok(doc?)
}

fn prepare_author(cfg: &ExperimentConfig, layout: &Layout, src: &AuthorSource) -> Result<CorpusStats> {
    let doc = read_author(src)?;
    let prepared = prepare_document(&doc);
    let stats = corpus_stats(&prepared);
    // a too-small corpus should be reported as such, not as a vocabulary problem
    split_labels(prepared.stems.len(), cfg.seeds[0])?;
    let vocab = build_vocabulary(&prepared.stems)?;
    let encoded = cfg
        .seeds
        .iter()
        .map(|&seed| encode_and_split(&src.id, &prepared.stems, &vocab, seed))
        .collect::<authorlm::Result<Vec<_>>>()?;
    stats.check_oov_rate()?;
    layout::write_json(&layout.stems(&src.id), &prepared.stems)?;
    for corpus in &encoded {
        layout::write(&layout.encoded(&src.id, corpus.seed), corpus.to_json()? + "\n")?;
    }
    Ok(stats)
}

pub fn stats_csv(stats: &[CorpusStats]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = [
        "author",
        "sentences",
        "words",
        "words_per_sentence",
        "vocab_original",
        "vocab_stemmed",
        "vocab_pruned",
    ]
    .map(String::from)
    .to_vec();
    header.extend(COVERAGE_KS.iter().map(|k| format!("coverage_{k}")));
    header.push("oov_rate".into());
    w.write_record(&header)?;
    for s in stats {
        let mut row = vec![
            s.author_id.clone(),
            s.n_sentences.to_string(),
            s.n_words.to_string(),
            format!("{:.2}", s.words_per_sentence),
            s.vocab_original.to_string(),
            s.vocab_stemmed.to_string(),
            s.vocab_pruned.to_string(),
        ];
        row.extend(COVERAGE_KS.iter().map(|k| format!("{:.4}", s.coverage_topk[k])));
        row.push(format!("{:.4}", s.oov_rate));
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Segments, stems and encodes every author's text once per seed.
pub fn run(cfg: &ExperimentConfig, layout: &Layout) -> Result<Vec<CorpusStats>> {
    let mut authors: Vec<&AuthorSource> = cfg.authors.iter().collect();
    authors.sort_by(|a, b| a.id.cmp(&b.id));
    let stats = authors
        .par_iter()
        .map(|src| prepare_author(cfg, layout, src).with_context(|| format!("author {}", src.id)))
        .collect::<Result<Vec<_>>>()?;
    layout::write(&layout.stats_csv(), stats_csv(&stats)?)?;
    for s in &stats {
        log::info!(
            "{}: {} sentences, {} words, vocabulary {}",
            s.author_id,
            s.n_sentences,
            s.n_words,
            s.vocab_pruned
        );
    }
    Ok(stats)
}
