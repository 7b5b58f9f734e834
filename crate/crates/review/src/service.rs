use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::sync::{Arc, Mutex, PoisonError, RwLock};

use oncoextract::dataset::{read_corpus, read_label_export, Corpus, IngestFormat};
use oncoextract::schema::AnnotationSet;
use oncoextract::tagger::import_predictions;

use crate::error::{ReviewError, Result};
use crate::state::{Correction, ReviewState, SelectionMark};
use crate::store::Store;

/// Snapshots are written after this many events unless configured.
pub const DEFAULT_SNAPSHOT_EVERY: u64 = 100;

/// One served corpus. Mutations are serialized through `writer`; readers
/// take an `Arc` of the current state and never wait on a mutation in
/// progress.
#[derive(Debug)]
pub struct CorpusService {
    id: String,
    current: RwLock<Arc<ReviewState>>,
    writer: Mutex<Option<Store>>,
}

impl CorpusService {
    /// A service whose state lives only in memory.
    pub fn in_memory(id: impl Into<String>, state: ReviewState) -> CorpusService {
        CorpusService {
            id: id.into(),
            current: RwLock::new(Arc::new(state)),
            writer: Mutex::new(None),
        }
    }

    /// A service persisted under `dir`, recovering any earlier session.
    pub fn persistent(id: impl Into<String>, base: ReviewState, dir: &Path, snapshot_every: u64) -> Result<CorpusService> {
        let (store, state) = Store::open(dir, &base, snapshot_every)?;
        if state.version() > 0 {
            log::info!("{}: recovered state at version {}", dir.display(), state.version());
        }
        Ok(CorpusService {
            id: id.into(),
            current: RwLock::new(Arc::new(state)),
            writer: Mutex::new(Some(store)),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn state(&self) -> Arc<ReviewState> {
        self.current.read().unwrap_or_else(PoisonError::into_inner).clone()
    }

    fn mutate(&self, f: impl FnOnce(&ReviewState) -> Result<ReviewState>) -> Result<Arc<ReviewState>> {
        let mut writer = self.writer.lock().unwrap_or_else(PoisonError::into_inner);
        let next = f(&self.state())?;
        if let Some(store) = writer.as_mut() {
            store.record(&next)?;
        }
        let next = Arc::new(next);
        *self.current.write().unwrap_or_else(PoisonError::into_inner) = next.clone();
        Ok(next)
    }

    pub fn correct(&self, based_on: u64, correction: Correction) -> Result<Arc<ReviewState>> {
        self.mutate(|s| s.apply_correction(based_on, correction))
    }

    pub fn select(&self, based_on: Option<u64>, mark: SelectionMark) -> Result<Arc<ReviewState>> {
        self.mutate(|s| s.mark_selection(based_on, mark))
    }
}

/// The id a corpus is served under: its file stem.
pub fn corpus_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "corpus".to_string())
}

/// Reads a sentence-per-line corpus file.
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let file = File::open(path).map_err(|e| ReviewError::io(path, e))?;
    Ok(read_corpus(BufReader::new(file), IngestFormat::PlainSentences)?)
}

/// Reads an annotation file named by its stem. `.json` files are labelling
/// tool exports; anything else is span records, one per line. Any bad
/// record fails the whole file, and records for sentences outside the
/// corpus are reported as a corpus mismatch.
pub fn load_annotations(path: &Path, corpus: &Corpus) -> Result<AnnotationSet> {
    let source = corpus_id(path);
    let file = File::open(path).map_err(|e| ReviewError::io(path, e))?;
    let mismatch = |err: oncoextract::Error| match err {
        oncoextract::Error::UnknownSentence(_) | oncoextract::Error::CorpusMismatch(_) => {
            oncoextract::Error::CorpusMismatch(format!("{}: {err}", path.display()))
        }
        other => other,
    };
    if path.extension().is_some_and(|e| e == "json") {
        return read_label_export(&source, file, corpus).map_err(|e| mismatch(e).into());
    }
    let (set, report) = import_predictions(&source, BufReader::new(file), corpus)?;
    if let Some((index, err)) = report.rejected.into_iter().next() {
        return Err(match mismatch(err) {
            e @ oncoextract::Error::CorpusMismatch(_) => e,
            other => oncoextract::Error::Parse {
                index,
                message: format!("{}: {other}", path.display()),
            },
        }
        .into());
    }
    Ok(set)
}

/// Loads a corpus and its annotation files, persisting under
/// `state_dir/<corpus id>` when a state directory is given.
pub fn open_service(corpus_path: &Path, annotation_paths: &[&Path], state_dir: Option<&Path>) -> Result<CorpusService> {
    let id = corpus_id(corpus_path);
    let corpus = load_corpus(corpus_path)?;
    let sources = annotation_paths.iter().map(|p| load_annotations(p, &corpus)).collect::<Result<Vec<_>>>()?;
    let base = ReviewState::new(corpus, sources)?;
    match state_dir {
        Some(dir) => CorpusService::persistent(id.clone(), base, &dir.join(&id), DEFAULT_SNAPSHOT_EVERY),
        None => Ok(CorpusService::in_memory(id, base)),
    }
}
