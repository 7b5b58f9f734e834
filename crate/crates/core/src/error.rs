use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown endpoint class `{0}`")]
    UnknownClass(String),

    #[error("unknown sentence `{0}`")]
    UnknownSentence(String),

    #[error("span {start}..{end} is out of bounds for sentence `{sentence_id}` (length {len})")]
    OffsetOutOfBounds {
        sentence_id: String,
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("spans {first:?} and {second:?} overlap in sentence `{sentence_id}`")]
    OverlappingSpans {
        sentence_id: String,
        first: (usize, usize),
        second: (usize, usize),
    },

    #[error("span {start}..{end} does not fall on token boundaries")]
    MisalignedSpan { start: usize, end: usize },

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid fold count k={k} for {n} items")]
    InvalidK { k: usize, n: usize },

    #[error("hyperparameter axis `{0}` is empty")]
    EmptyAxis(&'static str),

    #[error("report has zero total support")]
    EmptyReport,

    #[error("annotation sets do not belong to the corpus: {0}")]
    CorpusMismatch(String),

    #[error("parse error in record {index}: {message}")]
    Parse { index: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl Error {
    /// True for errors caused by unreadable inputs rather than invalid content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}
