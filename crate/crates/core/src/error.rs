use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no window pair fits into a stream of length {n}")]
    EmptyScheme { n: usize },

    #[error("invalid window scheme: {0}")]
    InvalidScheme(String),

    #[error(
        "the null space of the window constraints contains only constants; every drift is detected at this length"
    )]
    NoAdversarialExists,

    #[error("no non-constant binary profile satisfies the window constraints ({fractional} entries are forced to fractional values)")]
    BinarizationInfeasible { fractional: usize },

    #[error("head length {a} is odd; a balanced binary head needs an even length")]
    OddHead { a: usize },

    #[error("no head count k in [1, {a}) makes {l}*k/{a} an integer")]
    NoFeasibleDuty { a: usize, l: usize },

    #[error("{panels} quadrature panels per smooth piece is below the floor of {floor} for a discontinuous function")]
    QuadratureUnstable { panels: usize, floor: usize },

    #[error("profile value {value} at t = {t} (index {index}) lies outside [0, 1]")]
    RangeViolation { index: usize, t: f64, value: f64 },

    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{context}: {source}")]
    Cell {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Innermost error once cell context has been peeled off.
    pub fn root(&self) -> &Error {
        match self {
            Error::Cell { source, .. } => source.root(),
            other => other,
        }
    }
}
