//! Turns the spans of one sentence into structured endpoint observations.

mod export;
mod resolve;

pub use export::{write_observations, OBSERVATION_COLUMNS};
pub use resolve::{attach_intervals, pair_positional, resolve_comparison, resolve_sentence, IntervalAttachment, Pairing};

use serde::Serialize;

use crate::lexical::{Decimal, Unit};
use crate::schema::{Base, Measure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Simple,
    Respectively,
    Comparison,
    Combined,
}

impl Construction {
    pub fn as_str(self) -> &'static str {
        match self {
            Construction::Simple => "simple",
            Construction::Respectively => "respectively",
            Construction::Comparison => "comparison",
            Construction::Combined => "combined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimePoint {
    pub value: Decimal,
    pub unit: Unit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub pmid: String,
    pub sentence_id: String,
    /// Char spans of the value, CI bounds and time point that went into the
    /// observation.
    pub spans: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndpointObservation {
    /// `{sentence_id}#{n}`, numbered in value order.
    pub id: String,
    pub base: Base,
    pub measure: Measure,
    pub value: Decimal,
    pub unit: Unit,
    pub ci_low: Option<Decimal>,
    pub ci_high: Option<Decimal>,
    pub time_point: Option<TimePoint>,
    pub construction: Construction,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IssueKind {
    LengthMismatch,
    UnpairedCi,
    AmbiguousGrouping,
    OrphanTimePoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolutionIssue {
    pub kind: IssueKind,
    pub detail: String,
    pub spans: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ResolutionDiagnostics {
    pub sentence_id: String,
    pub issues: Vec<ResolutionIssue>,
}

impl ResolutionDiagnostics {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }
}
