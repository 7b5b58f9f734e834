//! Token pattern DSL: parsing, matching and query ensembles.

mod ast;
mod ensemble;
mod matcher;
mod parser;

pub use ast::{Node, PatternAst, TokenClass};
pub use ensemble::{filter_corpus, sentence_passes, QueryEnsemble};
pub use matcher::{find_matches, find_matches_in, is_match, MatchInput, PatternMatch};
pub use parser::compile;
