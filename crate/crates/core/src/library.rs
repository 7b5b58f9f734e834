//! The bundled query library.
//!
//! On disk the library is a directory:
//!
//! ```text
//! endpoints/{os,pfs,dfs,orr,dor}.pat   one ensemble per endpoint base
//! negatives/*.pat                      confusion families, used as negative samples
//! high_recall.pat                      the test-set selection query
//! mentions.lex                         mention lexicon for the rule tagger
//! ```
//!
//! The same files are compiled into the binary, so [`QueryLibrary::builtin`]
//! needs no filesystem access.

use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::pattern::QueryEnsemble;
use crate::schema::Base;
use crate::tagger::MentionLexicon;

const ENDPOINTS: [(&str, &str); 5] = [
    ("OS", include_str!("../queries/endpoints/os.pat")),
    ("PFS", include_str!("../queries/endpoints/pfs.pat")),
    ("DFS", include_str!("../queries/endpoints/dfs.pat")),
    ("ORR", include_str!("../queries/endpoints/orr.pat")),
    ("DoR", include_str!("../queries/endpoints/dor.pat")),
];

const NEGATIVES: [(&str, &str); 5] = [
    ("age", include_str!("../queries/negatives/age.pat")),
    ("los", include_str!("../queries/negatives/los.pat")),
    ("median_duration", include_str!("../queries/negatives/median_duration.pat")),
    ("deviation", include_str!("../queries/negatives/deviation.pat")),
    ("bare_percent", include_str!("../queries/negatives/bare_percent.pat")),
];

const HIGH_RECALL: &str = include_str!("../queries/high_recall.pat");
const MENTIONS: &str = include_str!("../queries/mentions.lex");

#[derive(Debug, Clone)]
pub struct QueryLibrary {
    pub endpoints: Vec<QueryEnsemble>,
    pub negatives: Vec<QueryEnsemble>,
    pub high_recall: QueryEnsemble,
    pub mentions: MentionLexicon,
}

fn in_file(name: &str, err: Error) -> Error {
    match err {
        Error::Syntax { line, column, message } => Error::Syntax {
            line,
            column,
            message: format!("{name}: {message}"),
        },
        other => other,
    }
}

impl QueryLibrary {
    /// The library shipped with the crate.
    pub fn builtin() -> &'static QueryLibrary {
        static LIB: OnceLock<QueryLibrary> = OnceLock::new();
        LIB.get_or_init(|| {
            let parse = |items: &[(&str, &str)], dir: &str| -> Vec<QueryEnsemble> {
                items
                    .iter()
                    .map(|(name, src)| {
                        QueryEnsemble::parse(name, src)
                            .map_err(|e| in_file(&format!("{dir}/{name}"), e))
                            .expect("bundled query file")
                    })
                    .collect()
            };
            QueryLibrary {
                endpoints: parse(&ENDPOINTS, "endpoints"),
                negatives: parse(&NEGATIVES, "negatives"),
                high_recall: QueryEnsemble::parse("high_recall", HIGH_RECALL).expect("bundled high_recall.pat"),
                mentions: MentionLexicon::parse(MENTIONS).expect("bundled mentions.lex"),
            }
        })
    }

    /// Loads a library directory laid out like the bundled one.
    pub fn load(dir: &Path) -> Result<QueryLibrary> {
        let read_dir = |sub: &str| -> Result<Vec<QueryEnsemble>> {
            let path = dir.join(sub);
            let mut files: Vec<_> = std::fs::read_dir(&path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "pat"))
                .collect();
            files.sort();
            files
                .iter()
                .map(|p| QueryEnsemble::load(p).map_err(|e| in_file(&p.display().to_string(), e)))
                .collect()
        };
        let high_recall = QueryEnsemble::load(&dir.join("high_recall.pat"))?;
        let mentions_path = dir.join("mentions.lex");
        let mentions_src = std::fs::read_to_string(&mentions_path).map_err(|e| Error::Io(format!("{}: {e}", mentions_path.display())))?;
        Ok(QueryLibrary {
            endpoints: read_dir("endpoints")?,
            negatives: read_dir("negatives")?,
            high_recall,
            mentions: MentionLexicon::parse(&mentions_src).map_err(|e| in_file("mentions.lex", e))?,
        })
    }

    pub fn endpoint(&self, base: Base) -> Option<&QueryEnsemble> {
        self.endpoints.iter().find(|e| e.name == base.as_str())
    }
}
