//! Writes synthetic author corpora, one `<author>.txt` per author.
//!
//! usage: synth_corpus OUT_DIR [AUTHORS] [SENTENCES] [AUTHOR_WORDS] [PHRASES] [SEED]

use authorlm::synth::{author_corpora, SynthConfig};

fn arg<T: std::str::FromStr>(args: &[String], i: usize, default: T) -> T {
    args.get(i).and_then(|s| s.parse().ok()).unwrap_or(default)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().collect();
    let out = args.get(1).ok_or("usage: synth_corpus OUT_DIR [AUTHORS] [SENTENCES] [AUTHOR_WORDS] [PHRASES] [SEED]")?;
    let d = SynthConfig::default();
    let cfg = SynthConfig {
        n_authors: arg(&args, 2, d.n_authors),
        sentences_per_author: arg(&args, 3, d.sentences_per_author),
        author_words: arg(&args, 4, d.author_words),
        phrases_per_author: arg(&args, 5, d.phrases_per_author),
        seed: arg(&args, 6, d.seed),
        ..d
    };
    std::fs::create_dir_all(out)?;
    for doc in author_corpora(&cfg)? {
        // one sentence per line keeps the files readable
        let text = authorlm::corpus::segment_sentences(&doc.text).join("\n") + "\n";
        std::fs::write(std::path::Path::new(out).join(format!("{}.txt", doc.author_id)), text)?;
    }
    Ok(())
}
