//! Error type shared by the estimation core.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Beta pseudo-counts must be finite and strictly positive.
    InvalidBetaParams { a: f64, b: f64 },
    /// A count pair needs `successes <= trials` and at least one trial.
    InvalidCounts { successes: u32, trials: u32 },
    /// An argument fell outside the function's domain.
    Domain(String),
    /// Profile length does not match the model's booster count.
    DimensionMismatch { expected: usize, found: usize },
    /// No window of a windowed model covers the requested booster count.
    BinMiss { count: u32 },
    /// Model evaluation produced nonpositive pseudo-counts.
    NonPositivePrior { a: f64, b: f64 },
    /// A model was constructed with inconsistent pieces.
    InvalidModel(String),
    /// The dataset violates a structural invariant.
    InvalidDataset(String),
    /// A marker id occurs more than once in a dataset.
    DuplicateMarkerId { id: String },
    /// An operation that needs markers was handed an empty dataset.
    EmptyDataset,
    /// Simulation or split configuration is invalid.
    InvalidConfig(String),
    /// Two marker lists disagree in length.
    LengthMismatch { left: usize, right: usize },
    /// Two marker lists disagree on the id at a position (0-based).
    IdMismatch {
        index: usize,
        left: String,
        right: String,
    },
    /// Replicated evaluation needs at least two replicates.
    NotEnoughReplicates { found: usize },
    /// An error attributed to a specific marker.
    AtMarker { id: String, source: Box<Error> },
    /// Several markers failed; every failure is retained.
    Aggregate(Vec<Error>),
}

impl Error {
    /// Attach a marker id to an error bubbling out of a per-marker operation.
    pub(crate) fn at_marker(id: &str, source: Error) -> Error {
        Error::AtMarker {
            id: String::from(id),
            source: Box::new(source),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidBetaParams { a, b } => {
                write!(f, "beta parameters must be positive and finite, got ({a}, {b})")
            }
            Error::InvalidCounts { successes, trials } => {
                write!(f, "invalid counts: {successes} successes of {trials} trials")
            }
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "expected {expected} booster frequencies, found {found}")
            }
            Error::BinMiss { count } => {
                write!(f, "no window covers booster count {count}")
            }
            Error::NonPositivePrior { a, b } => {
                write!(f, "model yields nonpositive pseudo-counts ({a}, {b})")
            }
            Error::InvalidModel(msg) => write!(f, "invalid model: {msg}"),
            Error::InvalidDataset(msg) => write!(f, "invalid dataset: {msg}"),
            Error::DuplicateMarkerId { id } => write!(f, "duplicate marker id '{id}'"),
            Error::EmptyDataset => write!(f, "dataset contains no markers"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::LengthMismatch { left, right } => {
                write!(f, "marker lists differ in length: {left} vs {right}")
            }
            Error::IdMismatch { index, left, right } => {
                write!(f, "marker id mismatch at row {index}: '{left}' vs '{right}'")
            }
            Error::NotEnoughReplicates { found } => {
                write!(f, "need at least 2 replicates, found {found}")
            }
            Error::AtMarker { id, source } => write!(f, "marker '{id}': {source}"),
            Error::Aggregate(errors) => {
                write!(f, "{} markers failed", errors.len())?;
                for e in errors.iter().take(5) {
                    write!(f, "; {e}")?;
                }
                if errors.len() > 5 {
                    write!(f, "; ...")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::AtMarker { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}
