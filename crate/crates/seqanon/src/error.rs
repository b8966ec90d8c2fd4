use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: invalid character {ch:?} (allowed: ACGTRYSWKMBDHVN)")]
    InvalidCharacter { line: usize, ch: char },
    #[error("line {line}: sequence data before the first '>' header")]
    SequenceBeforeHeader { line: usize },
    #[error("line {line}: record header has no id")]
    MissingId { line: usize },
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
    #[error("record {id:?} has an empty sequence")]
    EmptySequence { id: String },
    #[error("no records found in FASTA input")]
    NoRecords,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset has {n} sequences but at least {min} are required")]
    DatasetTooSmall { n: usize, min: usize },
    #[error("aligned sequences differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("aligned sequence is empty")]
    EmptyAligned,
    #[error("invalid symbol {0:?} in aligned sequence")]
    InvalidSymbol(char),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("word size {0} is too small (minimum 4)")]
    WordSizeTooSmall(usize),
    #[error("word size {0} is too large (maximum 32)")]
    WordSizeTooLarge(usize),
    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),
    #[error("exhaustive matching supports at most {max} points, got {n}")]
    MatrixTooLarge { n: usize, max: usize },
    #[error("unknown output format {0:?} (expected \"tsv\" or \"json\")")]
    UnknownFormat(String),
    #[error("unknown method {0:?}")]
    UnknownMethod(String),
    #[error("cannot aggregate an empty report list")]
    NoReports,
    #[error("cannot aggregate mismatched reports: {0}")]
    MixedReports(String),
    #[error("requested size {size} exceeds dataset size {n}")]
    SizeExceedsDataset { size: usize, n: usize },
    #[error("invalid pairing solution: {0}")]
    InvalidPairing(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
