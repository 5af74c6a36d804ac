//! Data matrices and the calibration transform.
//!
//! A [`DataMatrix`] collects every expectation value of one BB84 run:
//!
//! ```text
//! [ 1      E(Y)     E(Y')   ]
//! [ E(X)   E(XY)    E(XY')  ]
//! [ E(X')  E(X'Y)   E(X'Y') ]
//! ```
//!
//! Alice's observed (possibly unsharp, non-orthogonal) measurements are
//! related to hypothetical sharp, mutually unbiased ones by an unsharpness
//! matrix `S(x1..x4)` and an orthogonalization matrix `R(theta)`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::entropy::{CorrelationTriple, CLAMP_TOL};
use crate::error::{domain, Error, Result, SignPair};

pub type Mat3 = [[f64; 3]; 3];

/// Slack allowed on `x2 >= 1 + |x1|` and `x4 >= 1 + |x3|` for rounding in
/// derived parameters.
const CONSTRAINT_TOL: f64 = 1e-12;

/// Entries may exceed `[-1, 1]` by this much before a matrix is infeasible.
pub const ENTRY_TOL: f64 = 1e-12;

/// Observed or hypothetical table of expectation values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDataMatrix")]
pub struct DataMatrix {
    d: Mat3,
}

#[derive(Deserialize)]
struct RawDataMatrix {
    d: Mat3,
}

impl TryFrom<RawDataMatrix> for DataMatrix {
    type Error = Error;

    fn try_from(raw: RawDataMatrix) -> Result<Self> {
        Self::new(raw.d)
    }
}

impl DataMatrix {
    /// Validates an observed data matrix: `d[0][0] == 1` and every pairwise
    /// triple reconstructs to a distribution.
    pub fn new(d: Mat3) -> Result<Self> {
        let m = Self::from_rows(d)?;
        let check = feasible(&m);
        match check.violation {
            None => Ok(m),
            Some(v) => Err(Error::InfeasibleData(v.to_string())),
        }
    }

    /// Only checks the fixed cell and finiteness; the result may describe no
    /// probability distribution (see [`feasible`]).
    pub fn from_rows(d: Mat3) -> Result<Self> {
        if d[0][0] != 1.0 {
            return Err(Error::InvalidDataMatrix(format!(
                "d[0][0] = {} but must be exactly 1",
                d[0][0]
            )));
        }
        if let Some((i, j)) = cells().find(|&(i, j)| !d[i][j].is_finite()) {
            return Err(Error::InvalidDataMatrix(format!("d[{i}][{j}] is not finite")));
        }
        Ok(Self { d })
    }

    pub fn rows(&self) -> &Mat3 {
        &self.d
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.d[row][col]
    }

    /// Correlation triple of Alice's observable `alice` (1 or 2) with Bob's
    /// observable `bob` (1 or 2).
    pub fn triple(&self, alice: usize, bob: usize) -> CorrelationTriple {
        CorrelationTriple::new(self.d[alice][0], self.d[0][bob], self.d[alice][bob])
    }

    /// The key-generating pair `(X, Y)`.
    pub fn key_triple(&self) -> CorrelationTriple {
        self.triple(1, 1)
    }

    /// True when all off-diagonal entries vanish within `tol`.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        cells()
            .filter(|&(i, j)| i != j)
            .all(|(i, j)| self.d[i][j].abs() <= tol)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        cells()
            .map(|(i, j)| (self.d[i][j] - other.d[i][j]).abs())
            .fold(0.0, f64::max)
    }
}

fn cells() -> impl Iterator<Item = (usize, usize)> {
    (0..3).flat_map(|i| (0..3).map(move |j| (i, j)))
}

/// Unsharpness parameters `x1..x4` and relative angle `theta` of Alice's
/// two measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationParams {
    x1: f64,
    x2: f64,
    x3: f64,
    x4: f64,
    theta: f64,
}

impl CalibrationParams {
    pub fn new(x1: f64, x2: f64, x3: f64, x4: f64, theta: f64) -> Result<Self> {
        if ![x1, x2, x3, x4, theta].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidCalibration("non-finite parameter".into()));
        }
        if x2 < 1.0 + x1.abs() - CONSTRAINT_TOL {
            return Err(Error::InvalidCalibration(format!(
                "x2 = {x2} < 1 + |x1| = {}",
                1.0 + x1.abs()
            )));
        }
        if x4 < 1.0 + x3.abs() - CONSTRAINT_TOL {
            return Err(Error::InvalidCalibration(format!(
                "x4 = {x4} < 1 + |x3| = {}",
                1.0 + x3.abs()
            )));
        }
        if !(theta > 0.0 && theta < PI) || theta.sin() <= 0.0 {
            return Err(Error::SingularAngle { theta });
        }
        Ok(Self {
            x1,
            x2,
            x3,
            x4,
            theta,
        })
    }

    /// Sharp measurements in mutually unbiased bases.
    pub fn ideal() -> Self {
        Self {
            x1: 0.0,
            x2: 1.0,
            x3: 0.0,
            x4: 1.0,
            theta: PI / 2.0,
        }
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }
    pub fn x2(&self) -> f64 {
        self.x2
    }
    pub fn x3(&self) -> f64 {
        self.x3
    }
    pub fn x4(&self) -> f64 {
        self.x4
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn as_tuple(&self) -> [f64; 5] {
        [self.x1, self.x2, self.x3, self.x4, self.theta]
    }
}

/// Correlation strength of the symmetric BB84 observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricObservation {
    sigma: f64,
}

impl SymmetricObservation {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&sigma) {
            return Err(domain("sigma", sigma, "[0, 1]"));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `sigma = 1 - 2Q`.
    pub fn from_qber(q: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&q) {
            return Err(domain("qber", q, "[0, 1/2]"));
        }
        Self::new(1.0 - 2.0 * q)
    }
}

/// `[[1,0,0],[x1,x2,0],[x3,0,x4]]`.
pub fn s_matrix(p: &CalibrationParams) -> Mat3 {
    [[1.0, 0.0, 0.0], [p.x1, p.x2, 0.0], [p.x3, 0.0, p.x4]]
}

/// `[[1,0,0],[0,1,0],[0,-cot(theta),csc(theta)]]`.
pub fn r_matrix(theta: f64) -> Result<Mat3> {
    let s = theta.sin();
    if !(theta > 0.0 && theta < PI) || s <= 0.0 {
        return Err(Error::SingularAngle { theta });
    }
    Ok([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -theta.cos() / s, 1.0 / s]])
}

/// Order in which `S` and `R` act on the observed data matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompositionOrder {
    /// `S . R . D`: orthogonalize the observed rows, then remove unsharpness.
    /// For `D = diag(1, s, s)` this yields third row
    /// `(x3, -s x4 cot(theta), s x4 csc(theta))`. Used throughout the crate.
    #[default]
    RotateThenScale,
    /// `R . S . D`: sharpen each observable first, then orthogonalize. Exact
    /// for unsharp measurements along non-orthogonal axes.
    ScaleThenRotate,
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Hypothetical data matrix of sharp, mutually unbiased measurements on
/// Alice's side. Row 0 is left unchanged. The output is not checked for
/// feasibility.
pub fn transform(d: &DataMatrix, p: &CalibrationParams) -> Result<DataMatrix> {
    transform_with_order(d, p, CompositionOrder::default())
}

pub fn transform_with_order(
    d: &DataMatrix,
    p: &CalibrationParams,
    order: CompositionOrder,
) -> Result<DataMatrix> {
    let s = s_matrix(p);
    let r = r_matrix(p.theta)?;
    let m = match order {
        CompositionOrder::RotateThenScale => mat_mul(&s, &r),
        CompositionOrder::ScaleThenRotate => mat_mul(&r, &s),
    };
    let mut out = mat_mul(&m, &d.d);
    // row 0 of S and R is e0, so this is exact already; pin it anyway
    out[0] = d.d[0];
    DataMatrix::from_rows(out)
}

/// First constraint a data matrix violates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    EntryOutOfRange { row: usize, col: usize, value: f64 },
    NegativeProbability {
        alice: usize,
        bob: usize,
        pair: SignPair,
        probability: f64,
    },
}

impl fmt::Display for Violation {
    /// Rows and columns are printed 1-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::EntryOutOfRange { row, col, value } => write!(
                f,
                "entry (row {}, col {}) = {value} outside [-1, 1]",
                row + 1,
                col + 1
            ),
            Violation::NegativeProbability {
                alice,
                bob,
                pair,
                probability,
            } => write!(
                f,
                "pair (row {}, col {}) reconstructs p{pair} = {probability:e} < 0",
                alice + 1,
                bob + 1
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    /// Smallest slack over all constraints: `1 - |entry|` and every
    /// reconstructed cell probability. Negative when violated.
    pub margin: f64,
    pub violation: Option<Violation>,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks that every entry lies in `[-1, 1]` and that the four pairwise
/// joints reconstruct to distributions under the clamp rule.
pub fn feasible(d: &DataMatrix) -> Feasibility {
    check_rows(d, &[1, 2])
}

/// Feasibility restricted to Alice's rows in `alice_rows` (plus row 0).
pub(crate) fn check_rows(d: &DataMatrix, alice_rows: &[usize]) -> Feasibility {
    let mut margin = f64::INFINITY;
    let mut violation = None;
    let rows = std::iter::once(0).chain(alice_rows.iter().copied());
    for i in rows {
        for j in 0..3 {
            let v = d.d[i][j];
            margin = margin.min(1.0 - v.abs());
            if violation.is_none() && v.abs() > 1.0 + ENTRY_TOL {
                violation = Some(Violation::EntryOutOfRange {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
    }
    for &alice in alice_rows {
        for bob in 1..3 {
            let (pair, p) = d.triple(alice, bob).min_cell();
            margin = margin.min(p);
            if violation.is_none() && p < -CLAMP_TOL {
                violation = Some(Violation::NegativeProbability {
                    alice,
                    bob,
                    pair,
                    probability: p,
                });
            }
        }
    }
    Feasibility { margin, violation }
}

/// `diag(1, sigma, sigma)`.
pub fn diagonal_data(sigma: SymmetricObservation) -> DataMatrix {
    let s = sigma.sigma;
    DataMatrix {
        d: [[1.0, 0.0, 0.0], [0.0, s, 0.0], [0.0, 0.0, s]],
    }
}
