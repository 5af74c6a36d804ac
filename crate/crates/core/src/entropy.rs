//! Shannon quantities for pairs of dichotomic (±1) random variables.
//!
//! All entropies are in bits. A pair of ±1 variables is fully described by
//! its three expectation values `(E[A], E[B], E[AB])`, and the joint table
//! is recovered as `p(a,b) = (1 + a E[A] + b E[B] + ab E[AB]) / 4`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result, SignPair};

/// Absolute tolerance on the total probability of a joint table.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Reconstructed probabilities in `[-CLAMP_TOL, 0)` are clamped to zero;
/// anything more negative is infeasible.
pub const CLAMP_TOL: f64 = 1e-9;

/// Signs in cell order: `(+,+)`, `(+,-)`, `(-,+)`, `(-,-)`.
pub const SIGN_PAIRS: [SignPair; 4] = [
    SignPair(1, 1),
    SignPair(1, -1),
    SignPair(-1, 1),
    SignPair(-1, -1),
];

fn index(sign: i8) -> usize {
    if sign > 0 {
        0
    } else {
        1
    }
}

/// Expectation values of two ±1 variables and of their product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTriple {
    pub ex: f64,
    pub ey: f64,
    pub exy: f64,
}

impl CorrelationTriple {
    pub const fn new(ex: f64, ey: f64, exy: f64) -> Self {
        Self { ex, ey, exy }
    }

    /// Unnormalized cell value `4 p(a,b)`.
    pub fn scaled_cell(&self, pair: SignPair) -> f64 {
        let (a, b) = (f64::from(pair.0), f64::from(pair.1));
        1.0 + a * self.ex + b * self.ey + a * b * self.exy
    }

    /// Smallest reconstructed cell probability (may be negative).
    pub fn min_cell(&self) -> (SignPair, f64) {
        SIGN_PAIRS
            .iter()
            .map(|&pair| (pair, self.scaled_cell(pair) / 4.0))
            .fold((SIGN_PAIRS[0], f64::INFINITY), |best, cur| {
                if cur.1 < best.1 {
                    cur
                } else {
                    best
                }
            })
    }

    /// True when the reconstructed joint is a distribution, up to [`CLAMP_TOL`].
    pub fn is_valid(&self) -> bool {
        self.min_cell().1 >= -CLAMP_TOL
    }
}

/// Joint distribution of two ±1 variables, `p[a][b]` with index 0 for `+1`
/// and 1 for `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointDistribution {
    p: [[f64; 2]; 2],
}

impl JointDistribution {
    pub fn new(p: [[f64; 2]; 2]) -> Result<Self> {
        let mut total = 0.0;
        for (a, row) in p.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidDistribution(format!(
                        "p[{a}][{b}] = {v} is not a nonnegative number"
                    )));
                }
                total += v;
            }
        }
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { p })
    }

    /// Applies the clamp rule to nearly-valid cells: values in
    /// `[-CLAMP_TOL, 0)` become zero and the table is renormalized.
    pub(crate) fn from_cells_clamped(cells: [[f64; 2]; 2]) -> Result<Self> {
        let mut p = cells;
        let mut total = 0.0;
        for &pair in &SIGN_PAIRS {
            let cell = &mut p[index(pair.0)][index(pair.1)];
            if !cell.is_finite() || *cell < -CLAMP_TOL {
                return Err(Error::Infeasible {
                    pair,
                    probability: *cell,
                });
            }
            *cell = cell.max(0.0);
            total += *cell;
        }
        for row in &mut p {
            for cell in row.iter_mut() {
                *cell /= total;
            }
        }
        Self::new(p)
    }

    pub fn prob(&self, a: i8, b: i8) -> f64 {
        self.p[index(a)][index(b)]
    }

    pub fn cells(&self) -> [[f64; 2]; 2] {
        self.p
    }

    pub fn marginal_a(&self) -> [f64; 2] {
        [self.p[0][0] + self.p[0][1], self.p[1][0] + self.p[1][1]]
    }

    pub fn marginal_b(&self) -> [f64; 2] {
        [self.p[0][0] + self.p[1][0], self.p[0][1] + self.p[1][1]]
    }

    /// Recomputes `(E[A], E[B], E[AB])` by direct summation.
    pub fn correlations(&self) -> CorrelationTriple {
        let mut t = CorrelationTriple::new(0.0, 0.0, 0.0);
        for &pair in &SIGN_PAIRS {
            let p = self.prob(pair.0, pair.1);
            let (a, b) = (f64::from(pair.0), f64::from(pair.1));
            t.ex += a * p;
            t.ey += b * p;
            t.exy += a * b * p;
        }
        t
    }
}

fn neg_plogp(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

fn shannon(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs.into_iter().map(neg_plogp).sum()
}

/// Binary entropy `h2(x) = -x log2 x - (1-x) log2 (1-x)` with `0 log 0 = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain("probability", x, "[0, 1]"));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

/// Rebuilds the joint table of two ±1 variables from their expectations.
pub fn joint_from_correlations(c: CorrelationTriple) -> Result<JointDistribution> {
    let mut cells = [[0.0; 2]; 2];
    for &pair in &SIGN_PAIRS {
        cells[index(pair.0)][index(pair.1)] = c.scaled_cell(pair) / 4.0;
    }
    JointDistribution::from_cells_clamped(cells)
}

pub fn joint_entropy(j: &JointDistribution) -> f64 {
    shannon(j.p.iter().flatten().copied())
}

pub fn marginal_entropy_a(j: &JointDistribution) -> f64 {
    shannon(j.marginal_a())
}

pub fn marginal_entropy_b(j: &JointDistribution) -> f64 {
    shannon(j.marginal_b())
}

/// `I(A:B) = H(A) + H(B) - H(A,B)`.
pub fn mutual_information(j: &JointDistribution) -> f64 {
    (marginal_entropy_a(j) + marginal_entropy_b(j) - joint_entropy(j)).max(0.0)
}

/// `H(A|B) = H(A,B) - H(B)`.
pub fn conditional_entropy(j: &JointDistribution) -> f64 {
    (joint_entropy(j) - marginal_entropy_b(j)).max(0.0)
}

/// Fano-type upper bound `h2((1 - E[AB]) / 2)` on `H(A|B)`; the argument is
/// the probability that the two outcomes disagree.
pub fn disagreement_entropy_bound(c: CorrelationTriple) -> Result<f64> {
    if !(-1.0..=1.0).contains(&c.exy) {
        return Err(domain("E[AB]", c.exy, "[-1, 1]"));
    }
    binary_entropy((1.0 - c.exy) / 2.0)
}
