use serde::Serialize;

use crate::dataset::Corpus;
use crate::error::{Error, Result};
use crate::lexical::tokenize;
use crate::schema::{AnnotationSet, EntitySpan};
use crate::tagger::encode;

/// How two span sets differ on one sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SentenceDiff {
    pub sentence_id: String,
    pub only_a: Vec<EntitySpan>,
    pub only_b: Vec<EntitySpan>,
    /// Same offsets, different class: `(a's span, b's span)`.
    pub conflicts: Vec<(EntitySpan, EntitySpan)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    pub token_agreement: f64,
    pub tokens: usize,
    pub agreeing_tokens: usize,
    pub disagreeing_sentences: Vec<SentenceDiff>,
}

fn check_corpus(set: &AnnotationSet, corpus: &Corpus) -> Result<()> {
    match set.sentence_ids().find(|id| corpus.sentence(id).is_none()) {
        Some(id) => Err(Error::CorpusMismatch(format!("`{id}` of `{}` is not in the corpus", set.source))),
        None => Ok(()),
    }
}

fn diff(sentence_id: &str, a: &[EntitySpan], b: &[EntitySpan]) -> Option<SentenceDiff> {
    if a == b {
        return None;
    }
    let mut only_a: Vec<EntitySpan> = a.iter().filter(|s| !b.contains(s)).cloned().collect();
    let mut only_b: Vec<EntitySpan> = b.iter().filter(|s| !a.contains(s)).cloned().collect();
    let mut conflicts = Vec::new();
    only_a.retain(|x| match only_b.iter().position(|y| y.range() == x.range()) {
        Some(i) => {
            conflicts.push((x.clone(), only_b.remove(i)));
            false
        }
        None => true,
    });
    Some(SentenceDiff {
        sentence_id: sentence_id.to_string(),
        only_a,
        only_b,
        conflicts,
    })
}

/// One entry per sentence where the span sets differ, in corpus order.
pub fn disagreements(a: &AnnotationSet, b: &AnnotationSet, corpus: &Corpus) -> Result<Vec<SentenceDiff>> {
    check_corpus(a, corpus)?;
    check_corpus(b, corpus)?;
    Ok(corpus
        .sentences()
        .filter_map(|s| diff(&s.sentence_id, a.get(&s.sentence_id), b.get(&s.sentence_id)))
        .collect())
}

/// Share of tokens, over every sentence of the corpus, that receive the same
/// BIO tag from both sets.
pub fn agreement(a: &AnnotationSet, b: &AnnotationSet, corpus: &Corpus) -> Result<AgreementReport> {
    let disagreeing_sentences = disagreements(a, b, corpus)?;
    let (mut tokens, mut agreeing) = (0, 0);
    for sentence in corpus.sentences() {
        let toks = tokenize(&sentence.text);
        let ta = encode(a.get(&sentence.sentence_id), &toks)?;
        let tb = encode(b.get(&sentence.sentence_id), &toks)?;
        tokens += toks.len();
        agreeing += ta.tags.iter().zip(&tb.tags).filter(|(x, y)| x == y).count();
    }
    Ok(AgreementReport {
        token_agreement: if tokens == 0 { 1.0 } else { agreeing as f64 / tokens as f64 },
        tokens,
        agreeing_tokens: agreeing,
        disagreeing_sentences,
    })
}
