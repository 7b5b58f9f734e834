//! Shared inputs for the benchmarks.

use oncoextract::dataset::{generate_sentences, SynthConfig, SyntheticSentence};

/// A fixed synthetic workload of `n` sentences.
pub fn workload(n: usize) -> Vec<SyntheticSentence> {
    generate_sentences(&SynthConfig::new(n, 2024))
}
