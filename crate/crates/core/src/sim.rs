//! Monte Carlo sampling of the measurement stage of entanglement-based BB84.
//!
//! Every round picks Alice's basis from `{X, X'}` and Bob's from `{Y, Y'}`
//! uniformly and independently and draws the outcome pair from the exact
//! joint distribution of that basis pair. Rounds are split into fixed-size
//! blocks; block `k` draws from a ChaCha8 stream keyed by `(seed, k)`, so the
//! estimate is identical however the blocks are scheduled.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::DataMatrix;
use crate::entropy::JointDistribution;
use crate::error::{Error, Result};
use crate::qubit::{expectation, outcome_distribution, werner_state, MeasurementModel, TwoQubitState};

/// Rounds per independently seeded block.
pub const BLOCK_ROUNDS: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum StateSpec {
    Werner { visibility: f64 },
    Explicit(TwoQubitState),
}

impl StateSpec {
    pub fn state(&self) -> Result<TwoQubitState> {
        match *self {
            StateSpec::Werner { visibility } => werner_state(visibility),
            StateSpec::Explicit(s) => Ok(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub state: StateSpec,
    /// Alice's `X` and `X'`.
    pub alice: [MeasurementModel; 2],
    /// Bob's `Y` and `Y'`.
    pub bob: [MeasurementModel; 2],
    pub rounds: u64,
    pub seed: u64,
}

impl SimConfig {
    /// Ideal BB84 on a Werner state: sharp Z and X on both sides.
    pub fn werner(visibility: f64, rounds: u64, seed: u64) -> Self {
        let ideal = [MeasurementModel::ideal_z(), MeasurementModel::ideal_x()];
        Self {
            state: StateSpec::Werner { visibility },
            alice: ideal,
            bob: ideal,
            rounds,
            seed,
        }
    }

    fn validate(&self) -> Result<TwoQubitState> {
        if self.rounds == 0 {
            return Err(Error::InvalidConfig("rounds must be at least 1".into()));
        }
        self.state.state()
    }
}

/// Finite-sample estimate of a data matrix. `None` marks cells without data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatedDataMatrix {
    pub d: [[Option<f64>; 3]; 3],
    /// Rounds per basis pair, `counts[alice][bob]`.
    pub counts: [[u64; 2]; 2],
    pub stderr: [[Option<f64>; 3]; 3],
}

impl EstimatedDataMatrix {
    pub fn rounds(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Converts to a validated [`DataMatrix`], refusing undefined cells.
    pub fn data_matrix(&self) -> Result<DataMatrix> {
        let mut rows = [[0.0; 3]; 3];
        let mut missing = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                match self.d[i][j] {
                    Some(v) => rows[i][j] = v,
                    None => missing.push(format!("d[{i}][{j}]")),
                }
            }
        }
        if !missing.is_empty() {
            return Err(Error::UndefinedCells(missing.join(", ")));
        }
        DataMatrix::new(rows)
    }
}

/// Integer outcome sums per basis pair; merging is exact and commutative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    n: [[u64; 2]; 2],
    sum_a: [[i64; 2]; 2],
    sum_b: [[i64; 2]; 2],
    sum_ab: [[i64; 2]; 2],
}

impl Tally {
    fn merge(mut self, other: Self) -> Self {
        for i in 0..2 {
            for j in 0..2 {
                self.n[i][j] += other.n[i][j];
                self.sum_a[i][j] += other.sum_a[i][j];
                self.sum_b[i][j] += other.sum_b[i][j];
                self.sum_ab[i][j] += other.sum_ab[i][j];
            }
        }
        self
    }
}

/// Cumulative probabilities over cells `(+,+)`, `(+,-)`, `(-,+)`.
fn cumulative(j: &JointDistribution) -> [f64; 3] {
    let p = j.cells();
    let c0 = p[0][0];
    let c1 = c0 + p[0][1];
    [c0, c1, c1 + p[1][0]]
}

const OUTCOMES: [(i64, i64); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

fn sample_block(cdf: &[[[f64; 3]; 2]; 2], seed: u64, block: u64, rounds: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let mut t = Tally::default();
    for _ in 0..rounds {
        // bit 0: Alice's basis, bit 1: Bob's basis, top 53 bits: outcome draw
        let r = rng.next_u64();
        let (i, j) = ((r & 1) as usize, ((r >> 1) & 1) as usize);
        let u = (r >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let c = &cdf[i][j];
        let cell = if u < c[0] {
            0
        } else if u < c[1] {
            1
        } else if u < c[2] {
            2
        } else {
            3
        };
        let (a, b) = OUTCOMES[cell];
        t.n[i][j] += 1;
        t.sum_a[i][j] += a;
        t.sum_b[i][j] += b;
        t.sum_ab[i][j] += a * b;
    }
    t
}

fn mean_and_stderr(sum: i64, n: u64) -> (Option<f64>, Option<f64>) {
    if n == 0 {
        return (None, None);
    }
    let m = sum as f64 / n as f64;
    // a ±1 variable has variance 1 - m^2
    let se = ((1.0 - m * m).max(0.0) / n as f64).sqrt();
    (Some(m), Some(se))
}

/// Samples `config.rounds` rounds and estimates the data matrix.
///
/// Product cells `E(X_i Y_j)` use the rounds of basis pair `(i, j)`.
/// Alice's marginal `E(X_i)` and Bob's `E(Y_j)` use the matched pair
/// `(i, i)` resp. `(j, j)`, so that each matched-basis triple is the
/// empirical distribution of a single set of rounds.
pub fn run(config: &SimConfig) -> Result<EstimatedDataMatrix> {
    let state = config.validate()?;
    let mut cdf = [[[0.0; 3]; 2]; 2];
    for (i, ma) in config.alice.iter().enumerate() {
        for (j, mb) in config.bob.iter().enumerate() {
            cdf[i][j] = cumulative(&outcome_distribution(&state, ma, mb)?);
        }
    }
    let blocks = config.rounds.div_ceil(BLOCK_ROUNDS);
    let tally = (0..blocks)
        .into_par_iter()
        .map(|k| {
            let len = BLOCK_ROUNDS.min(config.rounds - k * BLOCK_ROUNDS);
            sample_block(&cdf, config.seed, k, len)
        })
        .reduce(Tally::default, Tally::merge);

    let mut d = [[None; 3]; 3];
    let mut stderr = [[None; 3]; 3];
    d[0][0] = Some(1.0);
    stderr[0][0] = Some(0.0);
    for i in 0..2 {
        let (m, s) = mean_and_stderr(tally.sum_a[i][i], tally.n[i][i]);
        d[i + 1][0] = m;
        stderr[i + 1][0] = s;
        let (m, s) = mean_and_stderr(tally.sum_b[i][i], tally.n[i][i]);
        d[0][i + 1] = m;
        stderr[0][i + 1] = s;
        for j in 0..2 {
            let (m, s) = mean_and_stderr(tally.sum_ab[i][j], tally.n[i][j]);
            d[i + 1][j + 1] = m;
            stderr[i + 1][j + 1] = s;
        }
    }
    Ok(EstimatedDataMatrix {
        d,
        counts: tally.n,
        stderr,
    })
}

/// Infinite-statistics data matrix from exact expectation values.
pub fn exact_data(config: &SimConfig) -> Result<DataMatrix> {
    let state = config.state.state()?;
    let mut rows = [[0.0; 3]; 3];
    rows[0][0] = 1.0;
    for (j, mb) in config.bob.iter().enumerate() {
        rows[0][j + 1] = expectation(&state, None, Some(mb));
    }
    for (i, ma) in config.alice.iter().enumerate() {
        rows[i + 1][0] = expectation(&state, Some(ma), None);
        for (j, mb) in config.bob.iter().enumerate() {
            rows[i + 1][j + 1] = expectation(&state, Some(ma), Some(mb));
        }
    }
    DataMatrix::new(rows)
}
