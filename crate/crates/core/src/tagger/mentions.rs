use std::ops::Range;

use crate::error::{Error, Result};
use crate::pattern::{compile, find_matches_in, MatchInput, PatternAst};
use crate::schema::Base;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MentionLabel {
    Endpoint(Base),
    /// A duration phrase that is DoR only in a response context.
    ConditionalDoR,
    /// A survival-like endpoint or quantity outside the inventory.
    Other,
}

impl MentionLabel {
    fn parse(s: &str) -> Option<MentionLabel> {
        match s {
            "DoR?" => Some(MentionLabel::ConditionalDoR),
            "other" => Some(MentionLabel::Other),
            _ => s.parse::<Base>().ok().map(MentionLabel::Endpoint),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mention {
    pub label: MentionLabel,
    pub tokens: Range<usize>,
}

/// Labelled patterns that locate endpoint mentions in a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MentionLexicon {
    entries: Vec<(MentionLabel, PatternAst)>,
}

impl MentionLexicon {
    /// Parses `LABEL: pattern` lines. Indented lines continue the previous
    /// entry; `#` starts a comment.
    pub fn parse(source: &str) -> Result<MentionLexicon> {
        let mut raw: Vec<(MentionLabel, usize, String)> = Vec::new();
        for (idx, line) in source.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if line.starts_with(char::is_whitespace) {
                if let Some(last) = raw.last_mut() {
                    last.2.push('\n');
                    last.2.push_str(line);
                    continue;
                }
            }
            let Some((label, rest)) = line.split_once(':') else {
                return Err(Error::Syntax {
                    line: line_no,
                    column: 1,
                    message: "expected `LABEL: pattern`".into(),
                });
            };
            let label = MentionLabel::parse(label.trim()).ok_or_else(|| Error::Syntax {
                line: line_no,
                column: 1,
                message: format!("unknown mention label `{}`", label.trim()),
            })?;
            // Blank out the label so pattern columns match the file.
            let pad = " ".repeat(line[..line.len() - rest.len()].chars().count());
            raw.push((label, line_no, format!("{pad}{rest}")));
        }
        let mut entries = Vec::with_capacity(raw.len());
        for (label, line_no, text) in raw {
            let pattern = compile(&text).map_err(|err| match err {
                Error::Syntax { line, column, message } => Error::Syntax {
                    line: line_no + line - 1,
                    column,
                    message,
                },
                other => other,
            })?;
            entries.push((label, pattern));
        }
        Ok(MentionLexicon { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Non-overlapping mentions in sentence order. Longer matches win; ties go
    /// to the earlier match, then to the earlier lexicon entry.
    pub fn find(&self, input: &MatchInput<'_>) -> Vec<Mention> {
        let mut candidates: Vec<(usize, Mention)> = Vec::new();
        for (order, (label, pattern)) in self.entries.iter().enumerate() {
            for m in find_matches_in(pattern, input) {
                candidates.push((order, Mention { label: *label, tokens: m.tokens }));
            }
        }
        candidates.sort_by(|(oa, a), (ob, b)| {
            b.tokens
                .len()
                .cmp(&a.tokens.len())
                .then(a.tokens.start.cmp(&b.tokens.start))
                .then(oa.cmp(ob))
        });
        let mut taken = vec![false; input.tokens().len()];
        let mut out = Vec::new();
        for (_, m) in candidates {
            if m.tokens.clone().any(|t| taken[t]) {
                continue;
            }
            m.tokens.clone().for_each(|t| taken[t] = true);
            out.push(m);
        }
        out.sort_by_key(|m| m.tokens.start);
        out
    }
}
