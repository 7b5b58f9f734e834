pub mod dataset;
pub mod error;
pub mod eval;
pub mod lexical;
pub mod library;
pub mod pattern;
pub mod resolver;
pub mod schema;
pub mod tagger;

pub use error::{Error, Result};
