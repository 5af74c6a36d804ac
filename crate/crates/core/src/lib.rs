//! Calibration-robust one-way key rates for entanglement-based BB84.
//!
//! Given the observed correlations of a BB84 run in which Alice measures a
//! qubit with possibly unsharp, non-orthogonal measurements, this crate
//! computes the lower bound
//!
//! ```text
//! R >= I(X:Y) - max h2((1 - E(X'bar Y')) / 2)
//! ```
//!
//! where the maximum runs over all calibrations consistent with the data.
//! For the symmetric observation `diag(1, s, s)` it reduces to
//! `1 - 2 h2(Q)` with `Q = (1 - s) / 2`.
//!
//! ```
//! use qkdrate_core::{diagonal_data, rate_from_data, symmetric_rate, RateOptions, SymmetricObservation};
//!
//! let d = diagonal_data(SymmetricObservation::from_qber(0.05).unwrap());
//! let report = rate_from_data(&d, &RateOptions::default()).unwrap();
//! let closed = symmetric_rate(0.05).unwrap();
//! assert!((report.rate - closed.rate).abs() < 1e-12);
//! ```

#![allow(clippy::needless_range_loop)]

pub mod calibration;
pub mod entropy;
pub mod error;
pub mod keyrate;
pub mod qubit;
pub mod sim;

pub use calibration::{
    diagonal_data, feasible, r_matrix, s_matrix, transform, transform_with_order, CalibrationParams,
    CompositionOrder, DataMatrix, Feasibility, SymmetricObservation, Violation,
};
pub use entropy::{
    binary_entropy, conditional_entropy, disagreement_entropy_bound, joint_from_correlations,
    mutual_information, CorrelationTriple, JointDistribution,
};
pub use error::{Error, Result};
pub use keyrate::{
    general_adversary_bound, rate_from_data, symmetric_adversary_bound, symmetric_rate, threshold_qber,
    AdversaryBound, KeyRateReport, OptimizerSettings, OptimizerTrace, RateOptions,
};
pub use qubit::{
    expectation, outcome_distribution, true_calibration, werner_state, MeasurementModel, TwoQubitState,
};
pub use sim::{exact_data, run, EstimatedDataMatrix, SimConfig, StateSpec};
