use thiserror::Error;

use crate::groupoid::Violation;
use crate::semigroup::TableViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operands live in different spaces")]
    SpaceMismatch,
    #[error("cannot pick a point of the empty set")]
    EmptySet,
    #[error("set is not clopen: {0}")]
    NotClopen(String),
    #[error("point {point} is outside the domain of the map")]
    OutsideDomain { point: String },
    #[error("regular expression error at byte {pos}: {msg}")]
    Regex { pos: usize, msg: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid partial map: {0}")]
    InvalidMap(String),
    #[error("invalid inverse semigroup: {0}")]
    Semigroup(#[from] TableViolation),
    #[error("closure exceeded cap: reached {reached} elements with {frontier} still queued")]
    CapExceeded { reached: usize, frontier: usize },
    #[error("germ system violates {0}")]
    System(Box<Violation>),
    #[error("arrows are not composable: source {source_point} differs from range {range_point}")]
    NotComposable { source_point: String, range_point: String },
    #[error("label {0} is not in the label set")]
    UnknownLabel(String),
    #[error("operation needs {0}")]
    Unsupported(&'static str),
    #[error("power iteration did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("saturation did not stabilise within {0} iterations")]
    Unstable(usize),
    #[error("scenario {path}: {msg}")]
    Scenario { path: String, msg: String },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Error {
        Error::System(Box::new(v))
    }
}

impl Error {
    /// Process exit code for the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 2,
            Error::CapExceeded { .. } | Error::Unstable(_) | Error::NonConvergence { .. } => 3,
            _ => 1,
        }
    }
}
