use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("integrand is not oscillatory: {0}")]
    NotOscillatory(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("scale must be nonzero")]
    InvalidScale,
    #[error("distribution mean is not zero: {0}")]
    NonZeroMean(f64),
    #[error("distribution has zero variance")]
    ZeroVariance,
    #[error("unsupported representation pair: {0}")]
    UnsupportedPair(String),
    #[error("unsupported representation: {0}")]
    UnsupportedRepresentation(String),
    #[error("degenerate interval: a={a} must be below b={b}")]
    DegenerateInterval { a: f64, b: f64 },
    #[error("grid point {0} is an atom of the limit distribution")]
    AtomOnGrid(f64),
    #[error("malformed interval union: {0}")]
    MalformedSet(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("event family is not a sigma-algebra: {0}")]
    NotSigmaAlgebra(String),
    #[error("test function bound violated: {0}")]
    UnboundedTestFn(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable identifier used in machine-readable error lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonConvergence(_) => "NonConvergence",
            Error::InvalidTolerance(_) => "InvalidTolerance",
            Error::InvalidInterval(_) => "InvalidInterval",
            Error::NotOscillatory(_) => "NotOscillatory",
            Error::OutOfRange(_) => "OutOfRange",
            Error::SizeLimit(_) => "SizeLimit",
            Error::InvalidParams(_) => "InvalidParams",
            Error::InvalidScale => "InvalidScale",
            Error::NonZeroMean(_) => "NonZeroMean",
            Error::ZeroVariance => "ZeroVariance",
            Error::UnsupportedPair(_) => "UnsupportedPair",
            Error::UnsupportedRepresentation(_) => "UnsupportedRepresentation",
            Error::DegenerateInterval { .. } => "DegenerateInterval",
            Error::AtomOnGrid(_) => "AtomOnGrid",
            Error::MalformedSet(_) => "MalformedSet",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::NotSigmaAlgebra(_) => "NotSigmaAlgebra",
            Error::UnboundedTestFn(_) => "UnboundedTestFn",
            Error::EmptyInput(_) => "EmptyInput",
            Error::Parse { .. } => "Parse",
            Error::Io(_) => "IoFailure",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
