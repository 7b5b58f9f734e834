//! Review service for endpoint annotations.
//!
//! A [`ReviewState`] is the base reconciled annotation set plus an event log
//! of span corrections and observation selections. [`CorpusService`] wraps a
//! state with optional persistence, and [`http::router`] exposes a set of
//! services over HTTP.

pub mod error;
pub mod export;
pub mod http;
pub mod service;
pub mod state;
pub mod store;

pub use error::{Result, ReviewError};
pub use export::{export_state, ExportView};
pub use service::{open_service, CorpusService};
pub use state::{Action, Correction, Event, LogEntry, ReviewState, Selection, SelectionMark, SpanRef, RECONCILED};
