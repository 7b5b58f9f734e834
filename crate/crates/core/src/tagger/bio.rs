use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexical::Token;
use crate::schema::{char_slice, enumerate_classes, EndpointClass, EntitySpan};

/// One BIO tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    O,
    B(EndpointClass),
    I(EndpointClass),
}

impl Tag {
    pub fn class(self) -> Option<EndpointClass> {
        match self {
            Tag::O => None,
            Tag::B(c) | Tag::I(c) => Some(c),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::O => f.write_str("O"),
            Tag::B(c) => write!(f, "B-{c}"),
            Tag::I(c) => write!(f, "I-{c}"),
        }
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Tag> {
        if s == "O" {
            return Ok(Tag::O);
        }
        match s.split_once('-') {
            Some(("B", c)) => Ok(Tag::B(c.parse()?)),
            Some(("I", c)) => Ok(Tag::I(c.parse()?)),
            _ => Err(Error::UnknownClass(s.to_string())),
        }
    }
}

impl Serialize for Tag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Tag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Tag, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `O` followed by `B-c`, `I-c` for every class: 51 tags.
pub fn all_tags() -> Vec<Tag> {
    let mut out = vec![Tag::O];
    for c in enumerate_classes() {
        out.push(Tag::B(c));
        out.push(Tag::I(c));
    }
    out
}

/// Tags aligned one-to-one with the tokens of a sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagSequence {
    pub tags: Vec<Tag>,
}

/// Something `decode` had to fix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairNote {
    pub token: usize,
    pub detail: String,
}

fn token_index_starting(tokens: &[Token], offset: usize) -> Option<usize> {
    tokens.binary_search_by_key(&offset, |t| t.start).ok()
}

fn token_index_ending(tokens: &[Token], offset: usize) -> Option<usize> {
    tokens.binary_search_by_key(&offset, |t| t.end).ok()
}

/// Token range covered by `span`, or `MisalignedSpan`.
pub fn span_tokens(span: &EntitySpan, tokens: &[Token]) -> Result<std::ops::Range<usize>> {
    let misaligned = || Error::MisalignedSpan {
        start: span.start,
        end: span.end,
    };
    let first = token_index_starting(tokens, span.start).ok_or_else(misaligned)?;
    let last = token_index_ending(tokens, span.end).ok_or_else(misaligned)?;
    if last < first {
        return Err(misaligned());
    }
    Ok(first..last + 1)
}

pub fn encode(spans: &[EntitySpan], tokens: &[Token]) -> Result<TagSequence> {
    let mut tags = vec![Tag::O; tokens.len()];
    let mut owner: Vec<Option<usize>> = vec![None; tokens.len()];
    for (s, span) in spans.iter().enumerate() {
        let range = span_tokens(span, tokens)?;
        for t in range.clone() {
            if let Some(prev) = owner[t] {
                return Err(Error::OverlappingSpans {
                    sentence_id: String::new(),
                    first: spans[prev].range(),
                    second: span.range(),
                });
            }
            owner[t] = Some(s);
            tags[t] = if t == range.start { Tag::B(span.class) } else { Tag::I(span.class) };
        }
    }
    Ok(TagSequence { tags })
}

/// Rebuilds spans from tags. An `I-c` that does not continue a `c` span opens
/// a new one and is reported. Missing tags count as `O`.
pub fn decode(tags: &TagSequence, tokens: &[Token], text: &str) -> (Vec<EntitySpan>, Vec<RepairNote>) {
    let mut notes = Vec::new();
    if tags.tags.len() != tokens.len() {
        notes.push(RepairNote {
            token: tags.tags.len().min(tokens.len()),
            detail: format!("{} tags for {} tokens", tags.tags.len(), tokens.len()),
        });
    }
    let mut out = Vec::new();
    let mut open: Option<(EndpointClass, usize, usize)> = None;
    let close = |open: &mut Option<(EndpointClass, usize, usize)>, out: &mut Vec<EntitySpan>| {
        if let Some((class, a, b)) = open.take() {
            let (start, end) = (tokens[a].start, tokens[b].end);
            out.push(EntitySpan {
                start,
                end,
                class,
                surface: char_slice(text, start, end).unwrap_or_default().to_string(),
            });
        }
    };
    for (t, &tag) in tags.tags.iter().enumerate().take(tokens.len()) {
        match tag {
            Tag::O => close(&mut open, &mut out),
            Tag::B(c) => {
                close(&mut open, &mut out);
                open = Some((c, t, t));
            }
            Tag::I(c) => match &mut open {
                Some((oc, _, end)) if *oc == c => *end = t,
                _ => {
                    notes.push(RepairNote {
                        token: t,
                        detail: format!("I-{c} without a preceding B-{c}; treated as B-{c}"),
                    });
                    close(&mut open, &mut out);
                    open = Some((c, t, t));
                }
            },
        }
    }
    close(&mut open, &mut out);
    (out, notes)
}
