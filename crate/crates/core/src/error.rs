use std::fmt;

use thiserror::Error;

/// Sign pair `(a, b)` of a dichotomic outcome, each `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignPair(pub i8, pub i8);

impl fmt::Display for SignPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |v: i8| if v > 0 { '+' } else { '-' };
        write!(f, "({},{})", s(self.0), s(self.1))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("correlations are not a probability distribution: p{pair} = {probability:e}")]
    Infeasible { pair: SignPair, probability: f64 },

    #[error("invalid probability table: {0}")]
    InvalidDistribution(String),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("measurement with zero sharpness cannot be calibrated")]
    DegenerateMeasurement,

    #[error("relative angle {theta} is singular (sin(theta) = 0)")]
    SingularAngle { theta: f64 },

    #[error("calibration constraint violated: {0}")]
    InvalidCalibration(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid data matrix: {0}")]
    InvalidDataMatrix(String),

    #[error("data matrix is infeasible: {0}")]
    InfeasibleData(String),

    #[error("no feasible calibration found for this data matrix")]
    NoFeasiblePoint,

    #[error("estimated data matrix has undefined cells: {0}")]
    UndefinedCells(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(what: &'static str, value: f64, domain_desc: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        domain: domain_desc,
    }
}
