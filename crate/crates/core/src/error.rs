use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("{path}: {source}")]
    JsonFile {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("column {0:?} not found in header")]
    UnknownColumn(String),

    #[error("row {row}: expected {expected} fields, found {found}")]
    LengthMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}: stratum flag must be 0 or 1, found {value:?}")]
    BadStratumFlag { row: usize, value: String },

    #[error("population needs at least 2 units, found {0}")]
    TooFewUnits(usize),

    #[error("malformed delimited file: {0}")]
    Csv(#[from] csv::Error),

    #[error("population size {population} is not a multiple of sample size {sample}")]
    NotDivisible { population: usize, sample: usize },

    #[error("{0} has zero variance; correlation is undefined")]
    ZeroVariance(&'static str),

    #[error("non-response stratum must contain at least one member and one non-member")]
    DegenerateStratum,

    #[error("invalid moments: {0}")]
    InvalidMoments(String),

    #[error("intraclass factor 1+(n-1)rho for {0} is negative")]
    NegativeIntraclassFactor(&'static str),

    #[error("auxiliary coefficient of variation c1 is zero; {0} optimum is undefined")]
    NoAuxiliaryVariation(&'static str),

    #[error("systematic start {start} outside 1..={interval}")]
    StartOutOfRange { start: usize, interval: usize },

    #[error("sub-sampling factor L must be >= 1, got {0}")]
    InvalidSubsamplingFactor(f64),

    #[error("non-response rate must lie in [0, 1), got {0}")]
    InvalidRate(f64),

    #[error("stratum mechanism requested but the population has no non-response stratum")]
    MissingStratum,

    #[error("no measured units in the sample")]
    NoMeasuredUnits,

    #[error("{estimator}: {reason}")]
    Domain {
        estimator: &'static str,
        reason: String,
    },

    #[error("{0}: quadratic for the shrinkage constants is singular")]
    SingularQuadratic(&'static str),

    #[error("objective not finite at {at:?} while minimising {family}")]
    NonFiniteObjective { family: &'static str, at: Vec<f64> },

    #[error(
        "{failed} of {total} replications failed for {estimator} (limit 1%); first error: {first}"
    )]
    DomainErrorRate {
        estimator: String,
        failed: usize,
        total: usize,
        first: String,
    },

    #[error("synthetic population targets infeasible: {0}")]
    Infeasible(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
