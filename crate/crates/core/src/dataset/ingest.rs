//! Corpus files.
//!
//! `plain_sentences`: one JSON object per line with `pmid`, `sentence_id`
//! and `text` (and optionally `section`).
//!
//! `abstract_records`: one JSON object per line with `pmid`, an optional
//! `title` and the abstract under `abstract` (or `text`). Abstracts are split
//! into sentences with ids `{pmid}-{n}`.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::Deserialize;

use super::{Corpus, Document};
use crate::error::{Error, Result};
use crate::schema::{Section, SentenceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IngestFormat {
    PlainSentences,
    AbstractRecords,
}

impl std::str::FromStr for IngestFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain_sentences" | "plain" | "sentences" => Ok(IngestFormat::PlainSentences),
            "abstract_records" | "abstracts" => Ok(IngestFormat::AbstractRecords),
            other => Err(Error::Parse {
                index: 0,
                message: format!("unknown corpus format `{other}`"),
            }),
        }
    }
}

#[derive(Deserialize)]
struct AbstractRecord {
    pmid: String,
    #[serde(default)]
    title: Option<String>,
    #[serde(alias = "text")]
    r#abstract: String,
}

/// Abbreviations whose trailing period never ends a sentence.
const NO_BREAK: &[&str] = &[
    "vs.", "v.", "Dr.", "Drs.", "Mr.", "Mrs.", "Ms.", "Prof.", "al.", "e.g.", "i.e.", "cf.", "Fig.", "Figs.", "Tab.", "No.", "Nos.", "approx.", "ca.", "resp.", "incl.", "Inc.", "Ltd.", "Co.", "St.", "Jr.", "Sr.", "Eq.", "Ref.", "Vol.", "pp.", "min.", "max.", "mo.", "yr.", "yrs.", "wk.", "wks.",
];

/// Char ranges of the sentences of `text`. A sentence ends at `.`, `!` or
/// `?` (plus closing brackets or quotes) followed by whitespace and an
/// uppercase letter or digit, unless the word before is a guarded
/// abbreviation.
pub fn split_sentences(text: &str) -> Vec<(usize, usize)> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        if matches!(chars[i], '.' | '!' | '?') {
            let mut end = i + 1;
            while end < chars.len() && matches!(chars[end], ')' | ']' | '"' | '\'' | '”' | '’') {
                end += 1;
            }
            let mut next = end;
            while next < chars.len() && chars[next].is_whitespace() {
                next += 1;
            }
            let breaks = next > end && next < chars.len() && (chars[next].is_uppercase() || chars[next].is_ascii_digit());
            if breaks && !(chars[i] == '.' && guarded(&chars, i)) {
                push_trimmed(&chars, start, end, &mut out);
                start = next;
                i = next;
                continue;
            }
        }
        i += 1;
    }
    push_trimmed(&chars, start, chars.len(), &mut out);
    out
}

fn guarded(chars: &[char], period: usize) -> bool {
    let mut w = period;
    while w > 0 && !chars[w - 1].is_whitespace() && chars[w - 1] != '(' {
        w -= 1;
    }
    let word: String = chars[w..=period].iter().collect();
    NO_BREAK.contains(&word.as_str())
}

fn push_trimmed(chars: &[char], mut start: usize, mut end: usize, out: &mut Vec<(usize, usize)>) {
    while start < end && chars[start].is_whitespace() {
        start += 1;
    }
    while end > start && chars[end - 1].is_whitespace() {
        end -= 1;
    }
    if start < end {
        out.push((start, end));
    }
}

fn substring(text: &str, start: usize, end: usize) -> String {
    text.chars().skip(start).take(end - start).collect()
}

/// Reads a corpus from any line source.
pub fn read_corpus<R: BufRead>(reader: R, format: IngestFormat) -> Result<Corpus> {
    let parse_err = |index: usize, e: serde_json::Error| Error::Parse { index, message: e.to_string() };
    match format {
        IngestFormat::PlainSentences => {
            let mut sentences = Vec::new();
            for (index, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                sentences.push(serde_json::from_str::<SentenceRecord>(&line).map_err(|e| parse_err(index, e))?);
            }
            Corpus::from_sentences(sentences)
        }
        IngestFormat::AbstractRecords => {
            let mut documents = Vec::new();
            let mut seen = std::collections::HashSet::new();
            for (index, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let record: AbstractRecord = serde_json::from_str(&line).map_err(|e| parse_err(index, e))?;
                if !seen.insert(record.pmid.clone()) {
                    return Err(Error::Parse {
                        index,
                        message: format!("duplicate pmid `{}`", record.pmid),
                    });
                }
                let sentences = split_sentences(&record.r#abstract)
                    .into_iter()
                    .enumerate()
                    .map(|(n, (s, e))| SentenceRecord {
                        sentence_id: format!("{}-{n}", record.pmid),
                        pmid: record.pmid.clone(),
                        text: substring(&record.r#abstract, s, e),
                        section: Some(Section::Abstract),
                    })
                    .collect();
                documents.push(Document {
                    pmid: record.pmid,
                    title: record.title,
                    sentences,
                });
            }
            Corpus::new(documents)
        }
    }
}

pub fn ingest(path: &Path, format: IngestFormat) -> Result<Corpus> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_corpus(BufReader::new(file), format)
}

/// Writes the corpus as `plain_sentences` lines.
pub fn write_corpus<W: Write>(corpus: &Corpus, mut out: W) -> Result<()> {
    for sentence in corpus.sentences() {
        serde_json::to_writer(&mut out, sentence).map_err(|e| Error::Io(e.to_string()))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
