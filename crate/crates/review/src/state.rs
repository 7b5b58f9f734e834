//! Review state as a fold over an event log.
//!
//! The base reconciled set is fixed when the state is created. Every accepted
//! event is appended to the log with the version it produced, so replaying the
//! log over the base reproduces the state.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use oncoextract::dataset::Corpus;
use oncoextract::resolver::{resolve_sentence, EndpointObservation, ResolutionDiagnostics};
use oncoextract::schema::{AnnotationSet, EndpointClass, EntitySpan};
use serde::{Deserialize, Serialize};

use crate::error::{ReviewError, Result};

/// Name of the reconciled layer wherever layers are addressed by name.
pub const RECONCILED: &str = "reconciled";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Add,
    Remove,
    /// Keeps the offsets of an existing span and changes its class.
    Reclass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanRef {
    pub start: usize,
    pub end: usize,
    pub label: EndpointClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correction {
    pub sentence_id: String,
    pub action: Action,
    pub span: SpanRef,
    pub author: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionMark {
    pub observation_id: String,
    pub selected: bool,
    pub reviewer: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    Correction(Correction),
    Selection(SelectionMark),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub version: u64,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub selected: bool,
    pub reviewer: String,
}

/// Everything the service knows about one corpus.
#[derive(Debug, Clone)]
pub struct ReviewState {
    corpus: Arc<Corpus>,
    sources: Arc<Vec<AnnotationSet>>,
    base: Arc<AnnotationSet>,
    version: u64,
    log: Vec<LogEntry>,
    reconciled: AnnotationSet,
    /// Only selected observations are kept; deselecting removes the entry.
    selections: BTreeMap<String, Selection>,
    observations: BTreeMap<String, (Vec<EndpointObservation>, ResolutionDiagnostics)>,
    corrected: BTreeSet<String>,
}

impl ReviewState {
    /// A fresh state whose reconciled set starts as a copy of the first
    /// source, or empty when there are no sources.
    pub fn new(corpus: Corpus, sources: Vec<AnnotationSet>) -> Result<ReviewState> {
        for set in &sources {
            set.validate_against(&corpus)?;
        }
        let mut names = BTreeSet::new();
        for set in &sources {
            if set.source == RECONCILED || !names.insert(set.source.as_str()) {
                return Err(oncoextract::Error::CorpusMismatch(format!("duplicate or reserved source name `{}`", set.source)).into());
            }
        }
        let mut base = sources.first().cloned().unwrap_or_default();
        base.source = RECONCILED.to_string();
        let mut state = ReviewState {
            corpus: Arc::new(corpus),
            sources: Arc::new(sources),
            base: Arc::new(base.clone()),
            version: 0,
            log: Vec::new(),
            reconciled: base,
            selections: BTreeMap::new(),
            observations: BTreeMap::new(),
            corrected: BTreeSet::new(),
        };
        state.resolve_all();
        Ok(state)
    }

    fn resolve_all(&mut self) {
        self.observations = self
            .corpus
            .sentences()
            .map(|s| (s.sentence_id.clone(), resolve_sentence(s, self.reconciled.get(&s.sentence_id))))
            .collect();
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn sources(&self) -> &[AnnotationSet] {
        &self.sources
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn base(&self) -> &AnnotationSet {
        &self.base
    }

    pub fn reconciled(&self) -> &AnnotationSet {
        &self.reconciled
    }

    pub fn selections(&self) -> &BTreeMap<String, Selection> {
        &self.selections
    }

    /// True once any correction has touched the sentence.
    pub fn is_corrected(&self, sentence_id: &str) -> bool {
        self.corrected.contains(sentence_id)
    }

    /// A named layer: a source or the reconciled set.
    pub fn layer(&self, name: &str) -> Option<&AnnotationSet> {
        if name == RECONCILED {
            return Some(&self.reconciled);
        }
        self.sources.iter().find(|s| s.source == name)
    }

    pub fn layer_names(&self) -> Vec<&str> {
        self.sources.iter().map(|s| s.source.as_str()).chain([RECONCILED]).collect()
    }

    /// Observations of the reconciled set, in corpus order.
    pub fn observations(&self) -> impl Iterator<Item = &EndpointObservation> {
        self.corpus.sentences().flat_map(|s| self.observations[&s.sentence_id].0.iter())
    }

    pub fn diagnostics(&self) -> impl Iterator<Item = &ResolutionDiagnostics> {
        self.corpus.sentences().map(|s| &self.observations[&s.sentence_id].1).filter(|d| !d.is_empty())
    }

    pub fn observation(&self, id: &str) -> Option<&EndpointObservation> {
        let (sid, _) = id.rsplit_once('#')?;
        self.observations.get(sid)?.0.iter().find(|o| o.id == id)
    }

    fn check_version(&self, based_on: u64) -> Result<()> {
        if based_on != self.version {
            return Err(ReviewError::StaleVersion {
                based_on,
                current: self.version,
            });
        }
        Ok(())
    }

    /// Applies a span edit made against `based_on`.
    pub fn apply_correction(&self, based_on: u64, correction: Correction) -> Result<ReviewState> {
        self.check_version(based_on)?;
        let mut next = self.clone();
        next.apply(Event::Correction(correction))?;
        Ok(next)
    }

    /// Records a selection. `based_on` is checked when given.
    pub fn mark_selection(&self, based_on: Option<u64>, mark: SelectionMark) -> Result<ReviewState> {
        if let Some(v) = based_on {
            self.check_version(v)?;
        }
        let mut next = self.clone();
        next.apply(Event::Selection(mark))?;
        Ok(next)
    }

    /// Applies one event without a version check, appending it to the log.
    pub fn apply(&mut self, event: Event) -> Result<()> {
        match &event {
            Event::Correction(c) => self.correct(c)?,
            Event::Selection(m) => self.select(m)?,
        }
        self.version += 1;
        self.log.push(LogEntry {
            version: self.version,
            event,
        });
        Ok(())
    }

    fn correct(&mut self, c: &Correction) -> Result<()> {
        let sentence = self
            .corpus
            .sentence(&c.sentence_id)
            .ok_or_else(|| ReviewError::NotFound(format!("sentence `{}`", c.sentence_id)))?
            .clone();
        let mut spans = self.reconciled.get(&c.sentence_id).to_vec();
        let SpanRef { start, end, label } = c.span;
        match c.action {
            Action::Add => {
                let span = EntitySpan::new(&sentence.text, start, end, label).map_err(|e| match e {
                    oncoextract::Error::OffsetOutOfBounds { start, end, len, .. } => oncoextract::Error::OffsetOutOfBounds {
                        sentence_id: c.sentence_id.clone(),
                        start,
                        end,
                        len,
                    },
                    other => other,
                })?;
                if let Some(existing) = spans.iter().find(|s| s.overlaps(&span)) {
                    return Err(ReviewError::OverlapConflict {
                        sentence_id: c.sentence_id.clone(),
                        start,
                        end,
                        existing: existing.range(),
                    });
                }
                spans.push(span);
            }
            Action::Remove => {
                let at = spans
                    .iter()
                    .position(|s| s.range() == (start, end) && s.class == label)
                    .ok_or_else(|| ReviewError::NotFound(format!("span {start}..{end} {label} in `{}`", c.sentence_id)))?;
                spans.remove(at);
            }
            Action::Reclass => {
                let span = spans
                    .iter_mut()
                    .find(|s| s.range() == (start, end))
                    .ok_or_else(|| ReviewError::NotFound(format!("span {start}..{end} in `{}`", c.sentence_id)))?;
                if span.class == label {
                    return Err(oncoextract::Error::CorpusMismatch(format!("span {start}..{end} is already {label}")).into());
                }
                span.class = label;
            }
        }
        self.reconciled.insert(&sentence, spans)?;
        let resolved = resolve_sentence(&sentence, self.reconciled.get(&c.sentence_id));
        self.observations.insert(c.sentence_id.clone(), resolved);
        self.corrected.insert(c.sentence_id.clone());
        Ok(())
    }

    fn select(&mut self, m: &SelectionMark) -> Result<()> {
        if self.observation(&m.observation_id).is_none() {
            return Err(ReviewError::NotFound(format!("observation `{}`", m.observation_id)));
        }
        if m.selected {
            self.selections.insert(
                m.observation_id.clone(),
                Selection {
                    selected: true,
                    reviewer: m.reviewer.clone(),
                },
            );
        } else {
            self.selections.remove(&m.observation_id);
        }
        Ok(())
    }

    /// Replays `entries` over a fresh copy of this state's base.
    pub fn replay<'a>(&self, entries: impl IntoIterator<Item = &'a LogEntry>) -> Result<ReviewState> {
        let mut state = self.rebased();
        for entry in entries {
            state.apply(entry.event.clone())?;
            if state.version != entry.version {
                return Err(ReviewError::StaleVersion {
                    based_on: entry.version,
                    current: state.version,
                });
            }
        }
        Ok(state)
    }

    /// The state before any event was applied.
    pub fn rebased(&self) -> ReviewState {
        let mut state = ReviewState {
            corpus: self.corpus.clone(),
            sources: self.sources.clone(),
            base: self.base.clone(),
            version: 0,
            log: Vec::new(),
            reconciled: (*self.base).clone(),
            selections: BTreeMap::new(),
            observations: BTreeMap::new(),
            corrected: BTreeSet::new(),
        };
        state.resolve_all();
        state
    }

    /// Restores from a snapshot taken after `log`. The snapshot's contents
    /// are trusted rather than recomputed.
    pub(crate) fn restore(&self, log: Vec<LogEntry>, snapshot: Snapshot) -> ReviewState {
        let mut state = self.rebased();
        state.version = snapshot.version;
        state.log = log;
        state.reconciled = snapshot.reconciled;
        state.selections = snapshot.selections;
        state.corrected = snapshot.corrected;
        state.resolve_all();
        state
    }

    pub(crate) fn snapshot(&self) -> Snapshot {
        Snapshot {
            version: self.version,
            reconciled: self.reconciled.clone(),
            selections: self.selections.clone(),
            corrected: self.corrected.clone(),
        }
    }

    /// Equality of everything derived from the log.
    pub fn same_contents(&self, other: &ReviewState) -> bool {
        self.version == other.version
            && self.log == other.log
            && self.reconciled == other.reconciled
            && self.selections == other.selections
            && self.corrected == other.corrected
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct Snapshot {
    pub version: u64,
    pub reconciled: AnnotationSet,
    pub selections: BTreeMap<String, Selection>,
    pub corrected: BTreeSet<String>,
}
