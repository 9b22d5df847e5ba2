use authorlm::corpus::{build_vocabulary, Vocabulary};
use authorlm::eval::{
    accuracy_curve, classify, confusion_matrix, decide, perplexity, AliasGroups, Candidate, ScoreTable, TestPool,
};
use authorlm::ngram::{count_ngrams, estimate_kneser_ney, NgramModel};
use authorlm::synth::unigram_sentences;
use authorlm::SentenceScore;
use proptest::prelude::*;

struct Author {
    id: String,
    vocab: Vocabulary,
    model: NgramModel,
    test: Vec<Vec<String>>,
}

fn words(sentences: Vec<Vec<usize>>) -> Vec<Vec<String>> {
    sentences
        .into_iter()
        .map(|s| s.into_iter().map(|w| format!("w{w}")).collect())
        .collect()
}

/// An author whose text is i.i.d. from `dist`, with a unigram model trained
/// on 2000 sentences and 200 held-out test sentences.
fn unigram_author(id: &str, dist: &[f64], seed: u64) -> Author {
    let train = words(unigram_sentences(dist, 2000, 8, seed).unwrap());
    let test = words(unigram_sentences(dist, 200, 8, seed + 1000).unwrap());
    let vocab = build_vocabulary(&train).unwrap();
    let encoded: Vec<Vec<usize>> = train.iter().map(|s| vocab.encode(s)).collect();
    let counts = count_ngrams(encoded.iter().map(Vec::as_slice), 1, vocab.len()).unwrap();
    Author {
        id: id.into(),
        vocab,
        model: estimate_kneser_ney(&counts),
        test,
    }
}

fn candidates(authors: &[Author]) -> Vec<Candidate<'_>> {
    authors
        .iter()
        .map(|a| Candidate {
            author_id: a.id.clone(),
            model: &a.model,
            vocab: &a.vocab,
        })
        .collect()
}

fn pools(authors: &[Author]) -> Vec<TestPool> {
    let cands = candidates(authors);
    authors
        .iter()
        .map(|a| TestPool {
            author_id: a.id.clone(),
            table: ScoreTable::build(&a.test, &cands, 0).unwrap(),
        })
        .collect()
}

/// Two authors preferring disjoint halves of a 20-word vocabulary.
fn preference_pair() -> Vec<Author> {
    let mut a = vec![1.0; 20];
    let mut b = vec![1.0; 20];
    for i in 0..10 {
        a[i] = 9.0;
        b[i + 10] = 9.0;
    }
    vec![unigram_author("a", &a, 1), unigram_author("b", &b, 2)]
}

#[test]
fn five_sentences_identify_the_author() {
    let authors = preference_pair();
    let curve = accuracy_curve(&pools(&authors), &AliasGroups::default(), 5..=5, 100, 3).unwrap();
    for a in ["a", "b"] {
        let acc = curve.mean_at(a, 5).unwrap();
        assert!(acc >= 0.99, "{a}: {acc}");
    }
}

#[test]
fn perfect_separation_is_always_right() {
    let a: Vec<f64> = (0..20).map(|i| if i < 10 { 1.0 } else { 0.0 }).collect();
    let b: Vec<f64> = (0..20).map(|i| if i >= 10 { 1.0 } else { 0.0 }).collect();
    let authors = vec![unigram_author("a", &a, 1), unigram_author("b", &b, 2)];
    let curve = accuracy_curve(&pools(&authors), &AliasGroups::default(), 1..=20, 30, 9).unwrap();
    assert!(curve.points.iter().all(|p| p.mean == 1.0 && p.std == 0.0));
    assert_eq!(curve.average.len(), 20);
    let cm = confusion_matrix(&pools(&authors), 50, 1).unwrap();
    assert_eq!(cm.log10[0][0], 0.0);
    assert_eq!(cm.log10[0][1], cm.floor);
    assert!((cm.floor - (1.0f64 / 51.0).log10()).abs() < 1e-15);
}

#[test]
fn classify_encodes_per_candidate() {
    let authors = preference_pair();
    let passage = &authors[1].test[..5];
    let trial = classify(passage, &candidates(&authors)).unwrap();
    assert_eq!(trial.predicted_author, "b");
    assert_eq!(trial.n_sentences, 5);
    assert_eq!(trial.ranked()[0].author_id, "b");
    // unknown words map to each candidate's OOV entry and are still scored
    let odd = vec![vec!["zzz".to_string(), "w3".to_string()]];
    let t = classify(&odd, &candidates(&authors)).unwrap();
    assert!(t.perplexities.iter().all(|p| p.perplexity.is_some()));
    let empty: Vec<Vec<String>> = vec![];
    assert!(classify(&empty, &candidates(&authors)).is_err());
}

#[test]
fn identical_models_tie_to_the_first_author() {
    let dist = vec![1.0; 10];
    let x = unigram_author("x", &dist, 5);
    let y = Author {
        id: "m".into(),
        vocab: x.vocab.clone(),
        model: x.model.clone(),
        test: vec![],
    };
    let authors = [x, y];
    let trial = classify(&authors[0].test[..3], &candidates(&authors)).unwrap();
    assert!(trial.tie);
    assert_eq!(trial.predicted_author, "m");
}

#[test]
fn confusion_rows_are_distributions() {
    let mut dists = Vec::new();
    for k in 0..4 {
        let d: Vec<f64> = (0..12).map(|i| if i % 4 == k { 3.0 } else { 1.0 }).collect();
        dists.push(d);
    }
    let authors: Vec<Author> = dists
        .iter()
        .enumerate()
        .map(|(i, d)| unigram_author(&format!("a{i}"), d, i as u64 + 10))
        .collect();
    let cm = confusion_matrix(&pools(&authors), 200, 4).unwrap();
    for (row, counts) in cm.log10.iter().zip(&cm.counts) {
        assert_eq!(counts.iter().sum::<usize>(), 200);
        let total: f64 = row
            .iter()
            .zip(counts)
            .filter(|(_, &c)| c > 0)
            .map(|(l, _)| 10f64.powf(*l))
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
    // same seed, same matrix
    assert_eq!(cm, confusion_matrix(&pools(&authors), 200, 4).unwrap());
}

#[test]
fn aliases_count_as_correct_and_leave_the_average() {
    let dist: Vec<f64> = (1..=15).map(|r| 1.0 / r as f64).collect();
    let mut other = dist.clone();
    other.reverse();
    let authors = vec![
        unigram_author("p", &dist, 1),
        unigram_author("q", &dist, 2),
        unigram_author("r", &other, 3),
    ];
    let groups = AliasGroups(vec![vec!["p".into(), "q".into()]]);
    let curve = accuracy_curve(&pools(&authors), &groups, 1..=3, 40, 2).unwrap();
    for p in curve.points.iter().filter(|p| p.author_id != "r") {
        assert!(p.mean > 0.9, "{p:?}");
    }
    let plain = accuracy_curve(&pools(&authors), &AliasGroups::default(), 1..=3, 40, 2).unwrap();
    assert!(plain.mean_at("p", 1).unwrap() < curve.mean_at("p", 1).unwrap());
    for p in &curve.average {
        assert_eq!(p.mean, curve.mean_at("r", p.n_sentences).unwrap());
    }
}

#[test]
fn small_pools_are_skipped() {
    let mut authors = preference_pair();
    authors[0].test.truncate(4);
    let curve = accuracy_curve(&pools(&authors), &AliasGroups::default(), 1..=5, 10, 1).unwrap();
    assert_eq!(curve.skipped, vec!["a".to_string()]);
    assert!(curve.points.iter().all(|p| p.author_id == "b"));
}

#[test]
fn trials_are_reproducible() {
    let authors = preference_pair();
    let a = accuracy_curve(&pools(&authors), &AliasGroups::default(), 1..=4, 25, 11).unwrap();
    let b = accuracy_curve(&pools(&authors), &AliasGroups::default(), 1..=4, 25, 11).unwrap();
    assert_eq!(a, b);
    let c = accuracy_curve(&pools(&authors), &AliasGroups::default(), 1..=4, 25, 12).unwrap();
    assert_ne!(a.log, c.log);
    for r in &a.log {
        let mut s = r.sentences.clone();
        s.sort_unstable();
        s.dedup();
        assert_eq!(s.len(), r.n_sentences, "drawn with replacement");
    }
}

proptest! {
    #[test]
    fn perplexity_ignores_repetition(p in 1e-6f64..1.0, s in 1usize..500) {
        let one = perplexity(p.log10(), 1).unwrap();
        let many = perplexity(s as f64 * p.log10(), s).unwrap();
        prop_assert!((one - many).abs() <= 1e-9 * one);
    }

    #[test]
    fn shifting_all_candidates_keeps_the_decision(
        sums in proptest::collection::vec(-200.0f64..-1.0, 2..8),
        shift in -50.0f64..50.0,
        n in 1usize..40,
    ) {
        let base: Vec<SentenceScore> = sums.iter().map(|&s| SentenceScore { sum_log10: s, n_scored: n }).collect();
        let shifted: Vec<SentenceScore> = sums.iter().map(|&s| SentenceScore { sum_log10: s + shift, n_scored: n }).collect();
        prop_assert_eq!(decide(&base).unwrap().predicted, decide(&shifted).unwrap().predicted);
    }
}
