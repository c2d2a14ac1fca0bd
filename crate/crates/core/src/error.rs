use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid angle: {0} is not finite")]
    InvalidAngle(f64),

    #[error("degenerate torsion: {0}")]
    DegenerateTorsion(&'static str),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid conformation: {0}")]
    InvalidConformation(String),

    #[error("unknown residue code {code:?} at position {position}")]
    UnknownResidue { code: char, position: usize },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error at row {row}, column {column:?}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("missing metadata: {0}")]
    Metadata(String),

    #[error("coordinate {0} does not fit the fixed-width PDB field")]
    FormatOverflow(f64),

    #[error("degenerate test: {0}")]
    DegenerateTest(&'static str),

    #[error("duplicate candidate id {0:?}")]
    DuplicateId(String),

    #[error("misaligned fragments: {0}")]
    Misaligned(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than an internal fault.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
