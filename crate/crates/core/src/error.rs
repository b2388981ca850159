use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        /// 0-based data row index (header excluded).
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("input contains no data rows")]
    EmptyDataset,

    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("unknown insight class `{0}`")]
    UnknownClass(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("insight is not a member of its class: {0}")]
    UnknownFocus(String),

    #[error("cannot merge sketches: {0}")]
    Merge(String),

    #[error("sketch has no rows")]
    EmptySketch,

    #[error("sign vector widths differ ({0} vs {1})")]
    WidthMismatch(usize, usize),

    #[error("column has no valid values")]
    EmptyColumn,

    #[error("dataset fingerprint mismatch: state expects {expected}, dataset has {found}")]
    FingerprintMismatch { expected: String, found: String },

    #[error("unsupported schema version {found} (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("insight references attribute `{0}` which is not in the dataset")]
    StaleInsight(String),

    #[error("invalid plant `{0}`")]
    InvalidPlant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}
