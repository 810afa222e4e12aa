use thiserror::Error;

use crate::report::Report;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes at the given assignment: {0}")]
    PoleAtAssignment(String),
    #[error("word of degree {degree} exceeds truncation bound {bound}")]
    DegreeOverflow { degree: u32, bound: u32 },
    #[error("no declared image for normal word `{0}`")]
    UnmappedWord(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),
    #[error("side mismatch: {0}")]
    SideMismatch(String),
    #[error("not a coideal: {0}")]
    NotCoideal(String),
    #[error("not a subalgebra: {0}")]
    NotSubalgebra(String),
    #[error("dimension {dim} exceeds the supported bound {bound}")]
    DimensionTooLarge { dim: usize, bound: usize },
    #[error("carrier element `{0}` is not group-like")]
    NotGrouplikeBasis(String),
    #[error("image `{0}` is not invertible")]
    NonInvertibleImage(String),
    #[error("element is not in the induced space: {0}")]
    NotInInducedSpace(String),
    #[error("twisted projection does not factor through the quotient: {0}")]
    TwistNotWellDefined(String),
    #[error("fixture `{name}` failed its gates")]
    GateFailure { name: String, report: Box<Report> },
    #[error("fixture not found: {0}")]
    FixtureNotFound(String),
    #[error("invalid fixture: {0}")]
    Fixture(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }
}
