use thiserror::Error;

/// Every failure the engine can report.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("field mismatch: operands live in different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("t^2 - ({p})t - ({q}) is reducible over Q")]
    ReducibleModulus { p: String, q: String },
    #[error("dimension mismatch: expected n = {expected}, got n = {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("operation on the zero polynomial")]
    ZeroPolynomial,
    #[error("kernel deficient: wanted {wanted} independent kernel vectors, found {found}")]
    KernelDeficient { wanted: usize, found: usize },
    #[error("cell (d={d}, m={m}) is not unexpected")]
    NotUnexpected { d: u32, m: u32 },
    #[error("unexpected form is not unique (kernel dimension {0})")]
    NonUniqueForm(usize),
    #[error("multiplicity mismatch: {0}")]
    MultiplicityMismatch(String),
    #[error("invalid degree data: {0}")]
    InvalidDegrees(String),
    #[error("unknown root system {name} of rank {rank}")]
    UnknownSystem { name: String, rank: u32 },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("SLP/unexpectedness equivalence violated at (d={d}, m={m}): slp fails = {slp_fails}, unexpected = {unexpected}")]
    EquivalenceViolation {
        d: u32,
        m: u32,
        slp_fails: bool,
        unexpected: bool,
    },
    #[error("two general-form samples disagree: {0}")]
    UnreliableSample(String),
    #[error("computation budget exceeded: {0}")]
    Budget(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
