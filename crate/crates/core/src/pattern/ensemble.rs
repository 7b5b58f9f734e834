use std::path::Path;

use super::matcher::{is_match, MatchInput};
use super::{compile, PatternAst};
use crate::error::{Error, Result};
use crate::lexical::{recognize_numerics, tokenize, NumericKind};
use crate::schema::SentenceRecord;

/// Positive patterns that select sentences for one endpoint, and negative
/// patterns that suppress them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryEnsemble {
    pub name: String,
    pub positive: Vec<PatternAst>,
    pub negative: Vec<PatternAst>,
}

impl QueryEnsemble {
    pub fn new(name: impl Into<String>, positive: Vec<PatternAst>, negative: Vec<PatternAst>) -> Result<Self> {
        let name = name.into();
        if positive.is_empty() {
            return Err(Error::Syntax {
                line: 1,
                column: 1,
                message: format!("ensemble `{name}` has no positive pattern"),
            });
        }
        Ok(QueryEnsemble { name, positive, negative })
    }

    /// Parses an ensemble file.
    ///
    /// ```text
    /// # comment
    /// ensemble OS
    /// + "overall" "survival"
    /// - "median" "age"
    ///     "of" "patients"      # indented lines continue the previous pattern
    /// ```
    pub fn parse(default_name: &str, source: &str) -> Result<QueryEnsemble> {
        let mut name = default_name.to_string();
        // (positive?, first line number, text)
        let mut entries: Vec<(bool, usize, String)> = Vec::new();
        for (idx, line) in source.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if line.starts_with(char::is_whitespace) {
                match entries.last_mut() {
                    Some(entry) => {
                        entry.2.push('\n');
                        entry.2.push_str(line);
                        continue;
                    }
                    None => {
                        return Err(Error::Syntax {
                            line: line_no,
                            column: 1,
                            message: "continuation line without a pattern".into(),
                        })
                    }
                }
            }
            if let Some(rest) = line.strip_prefix("ensemble") {
                name = rest.trim().to_string();
                continue;
            }
            let positive = match line.chars().next() {
                Some('+') => true,
                Some('-') => false,
                _ => {
                    return Err(Error::Syntax {
                        line: line_no,
                        column: 1,
                        message: "expected `+`, `-`, `ensemble` or a comment".into(),
                    })
                }
            };
            entries.push((positive, line_no, format!(" {}", &line[1..])));
        }
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (positive, line_no, text) in entries {
            let pattern = compile(&text).map_err(|err| match err {
                Error::Syntax { line, column, message } => Error::Syntax {
                    line: line_no + line - 1,
                    column,
                    message,
                },
                other => other,
            })?;
            if positive {
                pos.push(pattern.with_name(format!("{name}+{}", pos.len())));
            } else {
                neg.push(pattern.with_name(format!("{name}-{}", neg.len())));
            }
        }
        QueryEnsemble::new(name, pos, neg)
    }

    pub fn load(path: &Path) -> Result<QueryEnsemble> {
        let source = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("ensemble");
        QueryEnsemble::parse(stem, &source)
    }

    /// Positive match and no negative match on this sentence.
    pub fn accepts(&self, input: &MatchInput<'_>) -> bool {
        self.positive.iter().any(|p| is_match(p, input)) && !self.negative.iter().any(|p| is_match(p, input))
    }
}

/// Whether the sentence passes any ensemble and carries a duration or
/// percentage.
pub fn sentence_passes(ensembles: &[QueryEnsemble], text: &str) -> bool {
    let tokens = tokenize(text);
    let numerics = recognize_numerics(&tokens);
    if !numerics.iter().any(|m| matches!(m.kind, NumericKind::Duration | NumericKind::Percent)) {
        return false;
    }
    let input = MatchInput::with_numerics(&tokens, &numerics);
    ensembles.iter().any(|e| e.accepts(&input))
}

/// Streams the sentences that pass [`sentence_passes`], in input order.
pub fn filter_corpus<'e, I>(ensembles: &'e [QueryEnsemble], corpus: I) -> impl Iterator<Item = SentenceRecord> + 'e
where
    I: IntoIterator<Item = SentenceRecord>,
    I::IntoIter: 'e,
{
    corpus.into_iter().filter(move |s| sentence_passes(ensembles, &s.text))
}
