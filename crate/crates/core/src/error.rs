use thiserror::Error;

use crate::span::Span;

pub type Result<T> = std::result::Result<T, Error>;

/// Validation and parse failures raised by the core library.
///
/// Everything here is a problem with the input data; I/O failures are left to
/// the callers that own the readers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid span [{start}, {end}): start must be strictly below end")]
    EmptySpan { start: usize, end: usize },

    #[error("span {span} exceeds text length {len}")]
    SpanOutOfBounds { span: Span, len: usize },

    #[error("overlapping spans {0} and {1}")]
    OverlappingSpans(Span, Span),

    #[error("spans {0} and {1} expand onto the same token")]
    SharedToken(Span, Span),

    #[error("line {line}: unknown cue category `{name}`")]
    UnknownCueCategory { line: usize, name: String },

    #[error("line {line}: empty cue phrase")]
    EmptyPhrase { line: usize },

    #[error("line {line}: duplicate {category} cue `{phrase}`")]
    DuplicateCue {
        line: usize,
        category: String,
        phrase: String,
    },

    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("duplicate sample id `{0}`")]
    DuplicateId(String),

    #[error("unknown sample id `{0}`")]
    UnknownSample(String),

    #[error("unknown category `{0}`")]
    UnknownCategory(String),

    #[error("sample `{id}`: {message}")]
    InvalidSample { id: String, message: String },

    #[error("sample `{id}`: category {category} cannot be placed in the {partition} partition")]
    PartitionViolation {
        id: String,
        category: String,
        partition: String,
    },

    #[error("k = {k} is out of range (0..={available} generated samples available)")]
    KOutOfRange { k: usize, available: usize },

    #[error("reduction needs a positive baseline, got {0}")]
    NonPositiveBaseline(f64),

    #[error("cannot aggregate an empty list of reports")]
    NoReports,

    #[error("cannot aggregate reports of different groups: {0} vs {1}")]
    MixedReports(String, String),
}
