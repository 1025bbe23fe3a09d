use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("duplicate column for variable {0}")]
    DuplicateColumn(usize),
    #[error("non-numeric cell {value:?} at row {row}, column {col}")]
    NonNumericCell { row: usize, col: usize, value: String },
    #[error("dataset has no data rows")]
    EmptyBody,
    #[error("unknown variable name {0:?}")]
    UnknownName(String),
    #[error("variable {0} is not a column of the dataset")]
    MissingVariable(usize),
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow { row: usize, found: usize, expected: usize },

    #[error("cannot parse query: {0}")]
    Parse(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("cannot draw {k} queries from a universe of {universe}")]
    KTooLarge { k: usize, universe: usize },
    #[error("prediction and result lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("property values of different kinds: {0} vs {1}")]
    TagMismatch(&'static str, &'static str),
    #[error("invalid property value: {0}")]
    InvalidValue(String),

    #[error("invalid expected degree {0}")]
    InvalidDegree(f64),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("correlation is zero for pair ({0}, {1})")]
    ZeroCorrelation(usize, usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("node {0} is not part of the model")]
    UnknownNode(usize),
    #[error("graphs have different node counts ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("shared variable variances disagree ({0} vs {1})")]
    MarginalMismatch(f64, f64),
    #[error("input covariance is not positive semi-definite")]
    NonPsdInput,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("exhaustive enumeration supports n <= {max}, got {n}")]
    NTooLarge { n: usize, max: usize },
    #[error("{0}")]
    Unsupported(String),
    #[error("a {model} model cannot answer {property} queries")]
    UnsupportedQueryForModel { property: String, model: String },
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io(_) => "Io",
            Error::Csv(_) => "Csv",
            Error::Json(_) => "Json",
            Error::DuplicateColumn(_) => "DuplicateColumn",
            Error::NonNumericCell { .. } => "NonNumericCell",
            Error::EmptyBody => "EmptyBody",
            Error::UnknownName(_) => "UnknownName",
            Error::MissingVariable(_) => "MissingVariable",
            Error::RaggedRow { .. } => "RaggedRow",
            Error::Parse(_) => "ParseError",
            Error::InvalidQuery(_) => "InvalidQuery",
            Error::InvalidSize(_) => "InvalidSize",
            Error::KTooLarge { .. } => "KTooLarge",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::TagMismatch(..) => "TagMismatch",
            Error::InvalidValue(_) => "InvalidValue",
            Error::InvalidDegree(_) => "InvalidDegree",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::ZeroCorrelation(..) => "ZeroCorrelation",
            Error::InvalidGraph(_) => "InvalidGraph",
            Error::UnknownNode(_) => "UnknownNode",
            Error::SizeMismatch(..) => "SizeMismatch",
            Error::MarginalMismatch(..) => "MarginalMismatch",
            Error::NonPsdInput => "NonPsdInput",
            Error::InvalidParams(_) => "InvalidParams",
            Error::NTooLarge { .. } => "NTooLarge",
            Error::Unsupported(_) => "Unsupported",
            Error::UnsupportedQueryForModel { .. } => "UnsupportedQueryForModel",
        }
    }
}
