//! Two-qubit states and dichotomic qubit measurements.
//!
//! A dichotomic measurement with Bloch axis `n`, sharpness `eta` and bias `b`
//! has effects `E± = ((1 ± b) I ± eta n.sigma) / 2` and observable
//! `E+ - E- = b I + eta n.sigma`. Alice is the calibrated (trusted qubit)
//! party throughout this crate.

pub mod linalg;
pub mod sampling;

use num_complex::Complex64;

use crate::calibration::CalibrationParams;
use crate::entropy::{CorrelationTriple, JointDistribution};
use crate::error::{domain, Error, Result};
use linalg::{bloch_operator, kron, projector, CMat2, CMat4};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const AXIS_TOL: f64 = 1e-12;
const POVM_TOL: f64 = 1e-12;

/// Angles closer than this to 0 or pi are treated as (anti)parallel axes.
pub const DEGENERATE_ANGLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    rho: CMat4,
}

impl TwoQubitState {
    pub fn new(rho: CMat4) -> Result<Self> {
        let herm = rho.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (max |rho - rho^dagger| = {herm:e})"
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min_eig = rho.hermitian_eigenvalues()[0];
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (smallest eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self { rho })
    }

    pub fn rho(&self) -> &CMat4 {
        &self.rho
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.rho.hermitian_eigenvalues()
    }
}

/// `|Phi+> = (|00> + |11>) / sqrt(2)`.
pub fn phi_plus() -> [Complex64; 4] {
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    [a, z, z, a]
}

/// Depolarized Bell state `v |Phi+><Phi+| + (1 - v) I / 4`.
pub fn werner_state(visibility: f64) -> Result<TwoQubitState> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(domain("visibility", visibility, "[0, 1]"));
    }
    let rho = projector(&phi_plus()).scale(visibility)
        + CMat4::identity().scale((1.0 - visibility) / 4.0);
    TwoQubitState::new(rho)
}

/// Dichotomic qubit POVM described by a Bloch axis, sharpness and bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementModel {
    axis: [f64; 3],
    sharpness: f64,
    bias: f64,
}

impl MeasurementModel {
    pub fn new(axis: [f64; 3], sharpness: f64, bias: f64) -> Result<Self> {
        let norm = norm3(axis);
        if (norm - 1.0).abs() > AXIS_TOL {
            return Err(Error::InvalidMeasurement(format!(
                "axis has length {norm}, expected 1"
            )));
        }
        if !(0.0..=1.0).contains(&sharpness) {
            return Err(Error::InvalidMeasurement(format!(
                "sharpness {sharpness} outside [0, 1]"
            )));
        }
        if !bias.is_finite() || sharpness + bias.abs() > 1.0 + POVM_TOL {
            return Err(Error::InvalidMeasurement(format!(
                "sharpness + |bias| = {} exceeds 1",
                sharpness + bias.abs()
            )));
        }
        Ok(Self {
            axis,
            sharpness,
            bias,
        })
    }

    /// Normalizes `axis` before validating.
    pub fn along(axis: [f64; 3], sharpness: f64, bias: f64) -> Result<Self> {
        let norm = norm3(axis);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidMeasurement("zero axis".into()));
        }
        Self::new(axis.map(|c| c / norm), sharpness, bias)
    }

    /// Projective measurement along `axis`.
    pub fn sharp(axis: [f64; 3]) -> Result<Self> {
        Self::along(axis, 1.0, 0.0)
    }

    pub fn ideal_z() -> Self {
        Self {
            axis: [0.0, 0.0, 1.0],
            sharpness: 1.0,
            bias: 0.0,
        }
    }

    pub fn ideal_x() -> Self {
        Self {
            axis: [1.0, 0.0, 0.0],
            sharpness: 1.0,
            bias: 0.0,
        }
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// The projective measurement this one is a noisy version of.
    pub fn sharpened(&self) -> Self {
        Self {
            axis: self.axis,
            sharpness: 1.0,
            bias: 0.0,
        }
    }

    /// `b I + eta n.sigma`.
    pub fn observable(&self) -> CMat2 {
        CMat2::identity().scale(self.bias) + bloch_operator(self.axis).scale(self.sharpness)
    }

    /// Effect for outcome `+1` (`outcome > 0`) or `-1`.
    pub fn effect(&self, outcome: i8) -> CMat2 {
        let s = if outcome > 0 { 1.0 } else { -1.0 };
        (CMat2::identity() + self.observable().scale(s)).scale(0.5)
    }
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn local_observable(m: Option<&MeasurementModel>) -> CMat2 {
    m.map_or_else(CMat2::identity, MeasurementModel::observable)
}

/// `tr[rho (A (x) B)]`; `None` on either side stands for the identity, which
/// gives the marginal expectation of the other party.
pub fn expectation(
    state: &TwoQubitState,
    ma: Option<&MeasurementModel>,
    mb: Option<&MeasurementModel>,
) -> f64 {
    let op = kron(&local_observable(ma), &local_observable(mb));
    state.rho.trace_product(&op).re
}

/// The three expectations `(E[A], E[B], E[AB])` for a measurement pair.
pub fn correlations(
    state: &TwoQubitState,
    ma: &MeasurementModel,
    mb: &MeasurementModel,
) -> CorrelationTriple {
    CorrelationTriple::new(
        expectation(state, Some(ma), None),
        expectation(state, None, Some(mb)),
        expectation(state, Some(ma), Some(mb)),
    )
}

/// Outcome probabilities `p(a,b) = tr[rho (E_a (x) F_b)]`.
pub fn outcome_distribution(
    state: &TwoQubitState,
    ma: &MeasurementModel,
    mb: &MeasurementModel,
) -> Result<JointDistribution> {
    let mut cells = [[0.0; 2]; 2];
    for (i, a) in [1i8, -1].into_iter().enumerate() {
        for (j, b) in [1i8, -1].into_iter().enumerate() {
            let op = kron(&ma.effect(a), &mb.effect(b));
            cells[i][j] = state.rho.trace_product(&op).re;
        }
    }
    JointDistribution::from_cells_clamped(cells)
}

/// Calibration parameters realized by Alice's measurement pair.
///
/// Inverting `X = b I + eta n.sigma` gives the sharp observable
/// `n.sigma = x1 + x2 X` with `x1 = -b / eta`, `x2 = 1 / eta`, and likewise
/// `(x3, x4)` for the second measurement; `theta` is the angle between the
/// two Bloch axes.
pub fn true_calibration(
    ma: &MeasurementModel,
    ma_prime: &MeasurementModel,
) -> Result<CalibrationParams> {
    if ma.sharpness == 0.0 || ma_prime.sharpness == 0.0 {
        return Err(Error::DegenerateMeasurement);
    }
    let theta = axis_angle(ma.axis, ma_prime.axis);
    if !(DEGENERATE_ANGLE_TOL..=std::f64::consts::PI - DEGENERATE_ANGLE_TOL).contains(&theta) {
        return Err(Error::SingularAngle { theta });
    }
    CalibrationParams::new(
        -ma.bias / ma.sharpness,
        1.0 / ma.sharpness,
        -ma_prime.bias / ma_prime.sharpness,
        1.0 / ma_prime.sharpness,
        theta,
    )
}

/// Angle in `[0, pi]` between two unit vectors.
pub fn axis_angle(u: [f64; 3], v: [f64; 3]) -> f64 {
    // atan2 of |u x v| and u.v stays accurate near 0 and pi
    let cross = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    norm3(cross).atan2(dot)
}

/// Unit vector orthogonal to `n` in the plane spanned by `n` and `m`,
/// pointing towards `m`.
pub fn orthogonal_partner(n: [f64; 3], m: [f64; 3]) -> Option<[f64; 3]> {
    let dot = n[0] * m[0] + n[1] * m[1] + n[2] * m[2];
    let perp = [m[0] - dot * n[0], m[1] - dot * n[1], m[2] - dot * n[2]];
    let len = norm3(perp);
    (len > DEGENERATE_ANGLE_TOL).then(|| perp.map(|c| c / len))
}
