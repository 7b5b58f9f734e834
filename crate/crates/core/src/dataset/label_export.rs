//! Label-studio JSON exports.
//!
//! The export is a JSON array of tasks. Each task names its sentence through
//! `data.sentence_id` (or, failing that, through `data.text`) and carries
//! `annotations[].result[]` items of type `labels`. The first annotation that
//! was not cancelled is used. Offsets in the export count UTF-16 code units
//! and are converted to char offsets.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use super::Corpus;
use crate::error::{Error, Result};
use crate::schema::AnnotationSet;
use crate::tagger::build_spans;

#[derive(Deserialize)]
struct Task {
    #[serde(default)]
    data: TaskData,
    #[serde(default)]
    annotations: Vec<Annotation>,
}

#[derive(Deserialize, Default)]
struct TaskData {
    sentence_id: Option<String>,
    text: Option<String>,
}

#[derive(Deserialize)]
struct Annotation {
    #[serde(default)]
    was_cancelled: bool,
    #[serde(default)]
    result: Vec<ResultItem>,
}

#[derive(Deserialize)]
struct ResultItem {
    #[serde(default, rename = "type")]
    kind: Option<String>,
    value: ResultValue,
}

#[derive(Deserialize)]
struct ResultValue {
    start: Option<usize>,
    end: Option<usize>,
    #[serde(default)]
    labels: Vec<String>,
}

/// Maps a UTF-16 offset to a char offset.
fn utf16_to_char(text: &str, offset: usize) -> Option<usize> {
    let mut units = 0;
    for (i, c) in text.chars().enumerate() {
        if units == offset {
            return Some(i);
        }
        units += c.len_utf16();
        if units > offset {
            return None;
        }
    }
    (units == offset).then(|| text.chars().count())
}

pub fn read_label_export<R: Read>(source: &str, reader: R, corpus: &Corpus) -> Result<AnnotationSet> {
    let tasks: Vec<Task> = serde_json::from_reader(reader).map_err(|e| Error::Parse { index: 0, message: e.to_string() })?;
    let by_text: HashMap<&str, &str> = corpus.sentences().map(|s| (s.text.as_str(), s.sentence_id.as_str())).collect();
    let mut set = AnnotationSet::new(source);
    for (index, task) in tasks.into_iter().enumerate() {
        let sentence_id = match (&task.data.sentence_id, &task.data.text) {
            (Some(id), _) => id.clone(),
            (None, Some(text)) => by_text
                .get(text.as_str())
                .map(|s| s.to_string())
                .ok_or_else(|| Error::UnknownSentence(format!("task {index} text not in corpus")))?,
            (None, None) => {
                return Err(Error::Parse {
                    index,
                    message: "task has neither data.sentence_id nor data.text".into(),
                })
            }
        };
        let sentence = corpus.sentence(&sentence_id).ok_or_else(|| Error::UnknownSentence(sentence_id.clone()))?;
        if task.data.text.as_deref().is_some_and(|t| t != sentence.text) {
            return Err(Error::CorpusMismatch(format!("task {index} text differs from sentence `{sentence_id}`")));
        }
        let Some(annotation) = task.annotations.iter().find(|a| !a.was_cancelled) else { continue };
        let mut raw = Vec::new();
        for item in &annotation.result {
            if item.kind.as_deref().is_some_and(|k| k != "labels") {
                continue;
            }
            let (Some(start), Some(end)) = (item.value.start, item.value.end) else {
                return Err(Error::Parse {
                    index,
                    message: "labels result without start/end".into(),
                });
            };
            let out_of_bounds = || Error::OffsetOutOfBounds {
                sentence_id: sentence_id.clone(),
                start,
                end,
                len: sentence.text.encode_utf16().count(),
            };
            let start = utf16_to_char(&sentence.text, start).ok_or_else(out_of_bounds)?;
            let end = utf16_to_char(&sentence.text, end).ok_or_else(out_of_bounds)?;
            for label in &item.value.labels {
                raw.push((start, end, label.clone()));
            }
        }
        let spans = build_spans(corpus, &sentence_id, raw)?;
        set.insert(sentence, spans)?;
    }
    Ok(set)
}

pub fn import_label_export(path: &Path, corpus: &Corpus) -> Result<AnnotationSet> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let source = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    read_label_export(&source, std::io::BufReader::new(file), corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{EndpointClass, SentenceRecord};

    fn corpus() -> Corpus {
        Corpus::from_sentences(vec![
            SentenceRecord::new("p-0", "p", "Median OS was 14.1 months."),
            SentenceRecord::new("p-1", "p", "Median 𝑂S was 9 months."),
        ])
        .unwrap()
    }

    fn task(id: &str, start: usize, end: usize, label: &str) -> String {
        format!(
            r#"{{"data": {{"sentence_id": "{id}"}}, "annotations": [{{"was_cancelled": true, "result": []}}, {{"result": [{{"type": "labels", "value": {{"start": {start}, "end": {end}, "text": "x", "labels": ["{label}"]}}}}]}}]}}"#
        )
    }

    #[test]
    fn one_os_span() {
        let json = format!("[{}]", task("p-0", 14, 25, "OS"));
        let set = read_label_export("ls", json.as_bytes(), &corpus()).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.get("p-0")[0].class, EndpointClass::Os);
        assert_eq!(set.get("p-0")[0].surface, "14.1 months");
    }

    #[test]
    fn utf16_offsets_are_converted() {
        // the mathematical O takes two UTF-16 units
        let json = format!("[{}]", task("p-1", 15, 23, "OS"));
        let set = read_label_export("ls", json.as_bytes(), &corpus()).unwrap();
        assert_eq!(set.get("p-1")[0].surface, "9 months");
        let mid = format!("[{}]", task("p-1", 8, 10, "OS"));
        assert!(matches!(read_label_export("ls", mid.as_bytes(), &corpus()), Err(Error::OffsetOutOfBounds { .. })));
    }

    #[test]
    fn errors() {
        let unknown = format!("[{}]", task("p-0", 14, 25, "OS_rate"));
        assert_eq!(read_label_export("ls", unknown.as_bytes(), &corpus()), Err(Error::UnknownClass("OS_rate".into())));
        let oob = format!("[{}]", task("p-0", 14, 99, "OS"));
        assert!(matches!(read_label_export("ls", oob.as_bytes(), &corpus()), Err(Error::OffsetOutOfBounds { start: 14, end: 99, .. })));
        let missing = format!("[{}]", task("zz", 0, 1, "OS"));
        assert_eq!(read_label_export("ls", missing.as_bytes(), &corpus()), Err(Error::UnknownSentence("zz".into())));
    }

    #[test]
    fn finds_sentence_by_text() {
        let json = r#"[{"data": {"text": "Median OS was 14.1 months."}, "annotations": [{"result": [{"value": {"start": 7, "end": 9, "labels": ["OS"]}}]}]}]"#;
        let set = read_label_export("ls", json.as_bytes(), &corpus()).unwrap();
        assert_eq!(set.get("p-0")[0].surface, "OS");
    }
}
