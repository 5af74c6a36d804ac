//! One-way key rate `I(X:Y) - max H(X'bar | Y')`.
//!
//! The first term comes straight from the key-generating pair. The second is
//! bounded by `h2((1 - E(X'bar Y')) / 2)` evaluated on the hypothetical data
//! matrix of sharp, mutually unbiased measurements, maximized over every
//! calibration consistent with the observed data.

pub mod optimizer;

use serde::Serialize;

use crate::calibration::{DataMatrix, SymmetricObservation};
use crate::entropy::{binary_entropy, joint_from_correlations, mutual_information};
use crate::error::{domain, Result};
pub use optimizer::{OptimizerSettings, OptimizerTrace, THETA_MARGIN};

/// Off-diagonal magnitude below which a data matrix takes the analytic path.
pub const DIAGONAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyRateReport {
    pub mutual_info: f64,
    pub adversary_bound: f64,
    pub rate: f64,
    pub rate_clamped: f64,
    pub qber: Option<f64>,
    pub optimizer: Option<OptimizerTrace>,
}

impl KeyRateReport {
    fn new(mutual_info: f64, adversary_bound: f64, qber: Option<f64>, optimizer: Option<OptimizerTrace>) -> Self {
        let rate = mutual_info - adversary_bound;
        Self {
            mutual_info,
            adversary_bound,
            rate,
            rate_clamped: rate.max(0.0),
            qber,
            optimizer,
        }
    }
}

fn check_qber(q: f64) -> Result<()> {
    if (0.0..=0.5).contains(&q) {
        Ok(())
    } else {
        Err(domain("qber", q, "[0, 1/2]"))
    }
}

/// `1 - 2 h2(Q)`, with `I = 1 - h2(Q)` and adversary bound `h2(Q)`.
pub fn symmetric_rate(q: f64) -> Result<KeyRateReport> {
    check_qber(q)?;
    let h = binary_entropy(q)?;
    Ok(KeyRateReport::new(1.0 - h, h, Some(q), None))
}

/// Closed-form maximum for `D = diag(1, s, s)`: `h2((1 - s) / 2)`, attained at
/// `x4 = 1`, `theta = pi/2`.
pub fn symmetric_adversary_bound(sigma: SymmetricObservation) -> f64 {
    binary_entropy((1.0 - sigma.sigma()) / 2.0).expect("sigma in [0,1]")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversaryBound {
    pub bound: f64,
    pub params: crate::calibration::CalibrationParams,
    pub trace: OptimizerTrace,
}

/// Supremum of the disagreement bound over feasible calibrations.
pub fn general_adversary_bound(d: &DataMatrix, opts: &OptimizerSettings) -> Result<AdversaryBound> {
    let (best, trace) = optimizer::minimize_correlation(d, opts)?;
    let t = best.value.min(1.0);
    let bound = if t <= optimizer::ZERO_CORRELATION_TOL {
        1.0
    } else {
        binary_entropy((1.0 - t) / 2.0)?
    };
    Ok(AdversaryBound {
        bound,
        params: best.params,
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateOptions {
    /// Run the optimizer even when the analytic path applies.
    pub force_optimizer: bool,
    pub optimizer: OptimizerSettings,
}

/// Key rate from a validated data matrix.
pub fn rate_from_data(d: &DataMatrix, opts: &RateOptions) -> Result<KeyRateReport> {
    let key = d.key_triple();
    let mutual_info = mutual_information(&joint_from_correlations(key)?);
    let qber = {
        let q = (1.0 - key.exy) / 2.0;
        (0.0..=0.5).contains(&q).then_some(q)
    };
    if !opts.force_optimizer && d.is_diagonal(DIAGONAL_TOL) {
        // the bottom-right entry plays the role of sigma
        let s = d.get(2, 2).abs().min(1.0);
        let bound = symmetric_adversary_bound(SymmetricObservation::new(s)?);
        return Ok(KeyRateReport::new(mutual_info, bound, qber, None));
    }
    let adv = general_adversary_bound(d, &opts.optimizer)?;
    Ok(KeyRateReport::new(mutual_info, adv.bound, qber, Some(adv.trace)))
}

/// Root of `1 - 2 h2(Q)` on `(0, 1/2)` by bisection.
pub fn threshold_qber() -> f64 {
    let f = |q: f64| 1.0 - 2.0 * binary_entropy(q).expect("q in (0, 1/2)");
    let (mut lo, mut hi) = (1e-6, 0.5);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
