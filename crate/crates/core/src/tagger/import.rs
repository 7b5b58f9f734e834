//! Newline-delimited span records, one per sentence:
//!
//! ```text
//! {"sentence_id": "123-0", "spans": [[10, 14, "OS"], [20, 23, "OS_CIL"]], "score": 0.97}
//! ```
//!
//! Spans may also be objects `{"start": 10, "end": 14, "label": "OS"}`.
//! `score` is optional and kept but not used.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dataset::Corpus;
use crate::error::{Error, Result};
use crate::schema::{parse_class, AnnotationSet, EntitySpan};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ImportReport {
    pub accepted: usize,
    /// `(line index, error)` for every rejected record.
    pub rejected: Vec<(usize, Error)>,
    pub scores: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
struct RawRecord {
    sentence_id: String,
    #[serde(default)]
    spans: Vec<Value>,
    #[serde(default)]
    score: Option<f64>,
}

#[derive(Serialize)]
struct OutRecord<'a> {
    sentence_id: &'a str,
    spans: Vec<(usize, usize, &'a str)>,
}

fn raw_span(value: &Value, index: usize) -> Result<(usize, usize, String)> {
    let bad = |what: &str| Error::Parse {
        index,
        message: format!("malformed span {value}: {what}"),
    };
    let offset = |v: Option<&Value>| v.and_then(Value::as_u64).map(|x| x as usize);
    let (start, end, label) = match value {
        Value::Array(items) if items.len() == 3 => (offset(items.first()), offset(items.get(1)), items[2].as_str()),
        Value::Object(map) => (offset(map.get("start")), offset(map.get("end")), map.get("label").and_then(Value::as_str)),
        _ => return Err(bad("expected [start, end, label]")),
    };
    match (start, end, label) {
        (Some(s), Some(e), Some(l)) => Ok((s, e, l.to_string())),
        _ => Err(bad("missing field")),
    }
}

/// Builds validated spans for `sentence_id` from raw triples.
pub(crate) fn build_spans(corpus: &Corpus, sentence_id: &str, raw: Vec<(usize, usize, String)>) -> Result<Vec<EntitySpan>> {
    let sentence = corpus.sentence(sentence_id).ok_or_else(|| Error::UnknownSentence(sentence_id.to_string()))?;
    let mut spans = Vec::with_capacity(raw.len());
    for (start, end, label) in raw {
        let class = parse_class(&label)?;
        let span = EntitySpan::new(&sentence.text, start, end, class).map_err(|e| match e {
            Error::OffsetOutOfBounds { start, end, len, .. } => Error::OffsetOutOfBounds {
                sentence_id: sentence_id.to_string(),
                start,
                end,
                len,
            },
            other => other,
        })?;
        spans.push(span);
    }
    Ok(spans)
}

/// Reads prediction records. Each bad record is rejected on its own and
/// listed in the report; the rest are kept.
pub fn import_predictions<R: BufRead>(source: &str, reader: R, corpus: &Corpus) -> Result<(AnnotationSet, ImportReport)> {
    let mut set = AnnotationSet::new(source);
    let mut report = ImportReport::default();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let outcome = (|| -> Result<()> {
            let record: RawRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
                index,
                message: e.to_string(),
            })?;
            if set.contains(&record.sentence_id) {
                return Err(Error::Parse {
                    index,
                    message: format!("duplicate record for `{}`", record.sentence_id),
                });
            }
            let raw = record.spans.iter().map(|v| raw_span(v, index)).collect::<Result<Vec<_>>>()?;
            let spans = build_spans(corpus, &record.sentence_id, raw)?;
            let sentence = corpus.sentence(&record.sentence_id).expect("checked by build_spans");
            set.insert(sentence, spans)?;
            if let Some(score) = record.score {
                report.scores.insert(record.sentence_id.clone(), score);
            }
            Ok(())
        })();
        match outcome {
            Ok(()) => report.accepted += 1,
            Err(err) => report.rejected.push((index, err)),
        }
    }
    Ok((set, report))
}

/// Writes `set` in the record format above, in corpus order. Sentences of
/// the corpus without an entry are written with no spans.
pub fn write_annotations<W: Write>(set: &AnnotationSet, corpus: &Corpus, mut out: W) -> Result<()> {
    for sentence in corpus.sentences() {
        let spans = set.get(&sentence.sentence_id);
        let record = OutRecord {
            sentence_id: &sentence.sentence_id,
            spans: spans.iter().map(|s| (s.start, s.end, s.class.name())).collect(),
        };
        serde_json::to_writer(&mut out, &record).map_err(|e| Error::Io(e.to_string()))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
