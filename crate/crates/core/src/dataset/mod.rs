//! Corpora, annotation imports, training-set construction, splits, synthetic
//! data and the fine-tuning grid.

mod corpus;
mod grid;
mod ingest;
mod label_export;
mod split;
mod synth;

pub use corpus::{Corpus, Document};
pub use grid::{expand_grid, export_finetune_grid, FineTuneConfig, GridAxes};
pub use ingest::{ingest, read_corpus, split_sentences, write_corpus, IngestFormat};
pub use label_export::{import_label_export, read_label_export};
pub use split::{build_training_corpus, kfold, split_pmid_disjoint};
pub use synth::{generate_sentences, generate_synthetic, ClassWeights, Family, SynthConfig, SyntheticSentence};
