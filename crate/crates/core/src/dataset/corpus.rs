use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::SentenceRecord;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub pmid: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub sentences: Vec<SentenceRecord>,
}

/// Documents in source order, with an index from sentence id to sentence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    index: HashMap<String, (usize, usize)>,
}

impl Corpus {
    /// Validates pmid uniqueness, non-empty pmids and sentence id uniqueness.
    pub fn new(documents: Vec<Document>) -> Result<Corpus> {
        let mut index = HashMap::new();
        let mut pmids = HashMap::new();
        for (d, doc) in documents.iter().enumerate() {
            if doc.pmid.is_empty() {
                return Err(Error::Parse {
                    index: d,
                    message: "document has an empty pmid".into(),
                });
            }
            if pmids.insert(doc.pmid.clone(), d).is_some() {
                return Err(Error::Parse {
                    index: d,
                    message: format!("duplicate pmid `{}`", doc.pmid),
                });
            }
            for (s, sentence) in doc.sentences.iter().enumerate() {
                if sentence.pmid != doc.pmid {
                    return Err(Error::Parse {
                        index: d,
                        message: format!("sentence `{}` carries pmid `{}` inside document `{}`", sentence.sentence_id, sentence.pmid, doc.pmid),
                    });
                }
                if index.insert(sentence.sentence_id.clone(), (d, s)).is_some() {
                    return Err(Error::Parse {
                        index: d,
                        message: format!("duplicate sentence id `{}`", sentence.sentence_id),
                    });
                }
            }
        }
        Ok(Corpus { documents, index })
    }

    /// Groups sentences into documents by pmid, in order of first appearance.
    pub fn from_sentences(sentences: impl IntoIterator<Item = SentenceRecord>) -> Result<Corpus> {
        let mut documents: Vec<Document> = Vec::new();
        let mut by_pmid: HashMap<String, usize> = HashMap::new();
        for (i, sentence) in sentences.into_iter().enumerate() {
            if sentence.pmid.is_empty() {
                return Err(Error::Parse {
                    index: i,
                    message: format!("sentence `{}` has an empty pmid", sentence.sentence_id),
                });
            }
            let d = *by_pmid.entry(sentence.pmid.clone()).or_insert_with(|| {
                documents.push(Document {
                    pmid: sentence.pmid.clone(),
                    title: None,
                    sentences: Vec::new(),
                });
                documents.len() - 1
            });
            documents[d].sentences.push(sentence);
        }
        Corpus::new(documents)
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn sentences(&self) -> impl Iterator<Item = &SentenceRecord> {
        self.documents.iter().flat_map(|d| d.sentences.iter())
    }

    pub fn sentence(&self, sentence_id: &str) -> Option<&SentenceRecord> {
        let &(d, s) = self.index.get(sentence_id)?;
        Some(&self.documents[d].sentences[s])
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn into_sentences(self) -> Vec<SentenceRecord> {
        self.documents.into_iter().flat_map(|d| d.sentences).collect()
    }
}
