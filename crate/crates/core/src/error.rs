use thiserror::Error;

/// Errors raised while reading the two extraction inputs.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("empty document: no title, abstract or sections were extracted")]
    EmptyDocument,
}

#[derive(Debug, Error)]
pub enum MergeError {
    #[error("paper id mismatch: full text is {document:?}, figure manifest is {manifest:?}")]
    PaperIdMismatch { document: String, manifest: String },
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report unreadable: {0}")]
    ReportUnreadable(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    EmptyInput,
}

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("invalid record {record}: {}", .problems.join("; "))]
    InvalidRecord { record: String, problems: Vec<String> },
    #[error("empty input: no usable records")]
    EmptyInput,
    #[error("no overlapping papers between the two record sets")]
    NoOverlap,
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Errors that stop a single paper from rendering.
#[derive(Debug, Error)]
pub enum RenderError {
    #[error("full text: {0}")]
    FullText(ParseError),
    #[error("figure manifest: {0}")]
    Figures(ParseError),
    #[error(transparent)]
    Merge(#[from] MergeError),
}
