//! Training corpus selection, pmid-disjoint splits and seeded k-fold.
//!
//! Shuffling uses SplitMix64 (`rand_xoshiro::SplitMix64`: state advanced by
//! 0x9e3779b97f4a7c15, output mixed with 0xbf58476d1ce4e5b9 and
//! 0x94d049bb133111eb) driving a Fisher-Yates shuffle, so folds are the same
//! on every platform for a given seed.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

use super::Corpus;
use crate::error::{Error, Result};
use crate::lexical::tokenize;
use crate::pattern::{sentence_passes, MatchInput, QueryEnsemble};
use crate::schema::SentenceRecord;

/// Sentences selected by any endpoint ensemble (with a value present) plus
/// sentences matched by a negative ensemble, once each, in corpus order.
pub fn build_training_corpus(ensembles: &[QueryEnsemble], negatives: &[QueryEnsemble], corpus: &Corpus) -> Vec<SentenceRecord> {
    let mut seen = HashSet::new();
    corpus
        .sentences()
        .filter(|s| {
            sentence_passes(ensembles, &s.text) || {
                let tokens = tokenize(&s.text);
                let input = MatchInput::new(&tokens);
                negatives.iter().any(|n| n.accepts(&input))
            }
        })
        .filter(|s| seen.insert(s.sentence_id.clone()))
        .cloned()
        .collect()
}

/// Splits by pmid: sentences whose pmid is in `test_pmids` go to the test
/// side, the rest to training.
pub fn split_pmid_disjoint(sentences: Vec<SentenceRecord>, test_pmids: &BTreeSet<String>) -> (Vec<SentenceRecord>, Vec<SentenceRecord>) {
    sentences.into_iter().partition(|s| !test_pmids.contains(&s.pmid))
}

/// Shuffles with `seed` and deals the items into `k` folds of near-equal
/// size, larger folds first.
pub fn kfold<T: Clone>(items: &[T], k: usize, seed: u64) -> Result<Vec<Vec<T>>> {
    if k < 2 || k > items.len() {
        return Err(Error::InvalidK { k, n: items.len() });
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut SplitMix64::seed_from_u64(seed));
    let (base, extra) = (items.len() / k, items.len() % k);
    let mut folds = Vec::with_capacity(k);
    let mut at = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(order[at..at + size].iter().map(|&i| items[i].clone()).collect());
        at += size;
    }
    Ok(folds)
}
