//! Seeded generators shared by the property and acceptance tests.

use std::collections::BTreeMap;

use oncoextract::dataset::Corpus;
use oncoextract::eval::Tally;
use oncoextract::lexical::tokenize;
use oncoextract::schema::{AnnotationSet, EndpointClass, EntitySpan, SentenceRecord};
use rand::seq::IndexedRandom;
use rand::{Rng, RngExt};

const WORDS: &[&str] = &[
    "median", "overall", "survival", "OS", "PFS", "rate", "was", "were", "and", "vs", "versus", "than", "respectively", "months", "years", "5-year", "(", ")", "[", "]", ",", ";", "95%", "CI", "12.5", "3", "45%", "8.1", "the", "patients", "group", "to", "-", "response", "duration", "of",
];

pub fn sentence<R: Rng>(rng: &mut R) -> String {
    let n = rng.random_range(1..25);
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

/// Non-overlapping, token-aligned spans with random classes. Spans may touch.
pub fn legal_spans<R: Rng>(rng: &mut R, text: &str, max: usize) -> Vec<EntitySpan> {
    let tokens = tokenize(text);
    let mut spans = Vec::new();
    let mut t = 0;
    while t < tokens.len() && spans.len() < max {
        if rng.random_bool(0.35) {
            let len = rng.random_range(1..=3).min(tokens.len() - t);
            let class = *EndpointClass::ALL.choose(rng).unwrap();
            spans.push(EntitySpan::new(text, tokens[t].start, tokens[t + len - 1].end, class).unwrap());
            t += len;
        } else {
            t += 1;
        }
    }
    spans
}

/// A corpus of at most `max_sentences` sentences with gold spans and a
/// perturbed prediction set.
pub fn scoring_instance<R: Rng>(rng: &mut R, max_sentences: usize, max_spans: usize) -> (Corpus, AnnotationSet, AnnotationSet) {
    let n = rng.random_range(1..=max_sentences);
    let sentences: Vec<SentenceRecord> = (0..n).map(|i| SentenceRecord::new(format!("p{}-{i}", i % 3), format!("p{}", i % 3), sentence(rng))).collect();
    let corpus = Corpus::from_sentences(sentences).unwrap();
    let mut gold = AnnotationSet::new("gold");
    let mut pred = AnnotationSet::new("pred");
    for s in corpus.sentences() {
        let g = legal_spans(rng, &s.text, max_spans);
        let mut p: Vec<EntitySpan> = Vec::new();
        for span in &g {
            match rng.random_range(0..5) {
                0 => {}
                1 => p.push(EntitySpan::new(&s.text, span.start, span.end, *EndpointClass::ALL.choose(rng).unwrap()).unwrap()),
                _ => p.push(span.clone()),
            }
        }
        if rng.random_bool(0.3) {
            // a fresh prediction set that may disagree everywhere
            p = legal_spans(rng, &s.text, max_spans);
        }
        gold.insert(s, g).unwrap();
        pred.insert(s, p).unwrap();
    }
    (corpus, gold, pred)
}

/// Brute-force exact-match tallies by exhaustive pairwise comparison.
pub fn oracle_tally(gold: &AnnotationSet, pred: &AnnotationSet, corpus: &Corpus) -> BTreeMap<EndpointClass, Tally> {
    let mut out: BTreeMap<EndpointClass, Tally> = BTreeMap::new();
    for s in corpus.sentences() {
        let g = gold.get(&s.sentence_id);
        let p = pred.get(&s.sentence_id);
        for x in g {
            out.entry(x.class).or_default().gold += 1;
        }
        for y in p {
            let t = out.entry(y.class).or_default();
            t.predicted += 1;
            let mut hit = false;
            for x in g {
                if x.start == y.start && x.end == y.end && x.class == y.class {
                    hit = true;
                }
            }
            if hit {
                t.true_positives += 1;
            }
        }
    }
    out
}

/// Oracle precision, recall and F1 per class.
pub fn oracle_ratios(t: &Tally) -> (f64, f64, f64) {
    let p = if t.predicted == 0 { 0.0 } else { t.true_positives as f64 / t.predicted as f64 };
    let r = if t.gold == 0 { 0.0 } else { t.true_positives as f64 / t.gold as f64 };
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

/// Compares `score` against the oracle; returns a description of the first
/// difference.
pub fn check_against_oracle(corpus: &Corpus, gold: &AnnotationSet, pred: &AnnotationSet) -> Result<(), String> {
    let report = oncoextract::eval::score(gold, pred, corpus);
    let oracle = oracle_tally(gold, pred, corpus);
    let expected: Vec<_> = oracle.iter().filter(|(_, t)| t.gold + t.predicted > 0).collect();
    if expected.len() != report.rows.len() {
        return Err(format!("{} rows, oracle has {}", report.rows.len(), expected.len()));
    }
    let fast = oncoextract::eval::tally(gold, pred, corpus);
    for (class, t) in expected {
        let row = report.rows.get(class).ok_or(format!("missing row {class}"))?;
        if fast.get(class) != Some(t) || row.support != t.gold as f64 || row.predicted != t.predicted as f64 {
            return Err(format!("{class}: counts differ"));
        }
        let (p, r, f) = oracle_ratios(t);
        if (row.precision - p).abs() > 1e-9 || (row.recall - r).abs() > 1e-9 || (row.f1 - f).abs() > 1e-9 {
            return Err(format!("{class}: ratios differ"));
        }
    }
    Ok(())
}
