//! Self-checks run by `qkdrate verify`. Each compares a library result with
//! an independent reference: a closed form, a dense grid, or a direct
//! computation with sharp measurements.

use std::f64::consts::PI;
use std::fmt;

use qkdrate_core::calibration::feasible;
use qkdrate_core::entropy::{conditional_entropy, marginal_entropy_a};
use qkdrate_core::keyrate::optimizer::THETA_MARGIN;
use qkdrate_core::qubit::orthogonal_partner;
use qkdrate_core::qubit::sampling::{random_axis, random_measurement, random_mixed_state, random_unsharpness};
use qkdrate_core::{
    binary_entropy, diagonal_data, disagreement_entropy_bound, exact_data, general_adversary_bound,
    joint_from_correlations, mutual_information, rate_from_data, run, threshold_qber, transform,
    true_calibration, CalibrationParams, DataMatrix, JointDistribution, MeasurementModel,
    OptimizerSettings, RateOptions, SimConfig, StateSpec, SymmetricObservation, TwoQubitState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct CheckLine {
    pub name: &'static str,
    pub value: String,
    pub metric: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckLine {
    fn new(name: &'static str, value: String, metric: &'static str, deviation: f64, tolerance: f64) -> Self {
        Self {
            name,
            value,
            metric,
            deviation,
            tolerance,
            passed: deviation < tolerance,
        }
    }
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} ({} = {:.1e} < {:.0e}) {}",
            self.name,
            self.value,
            self.metric,
            self.deviation,
            self.tolerance,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

fn h2(x: f64) -> f64 {
    binary_entropy(x).expect("probability in range")
}

fn diag(sigma: f64) -> DataMatrix {
    diagonal_data(SymmetricObservation::new(sigma).expect("sigma in [0,1]"))
}

fn threshold() -> CheckLine {
    let q = threshold_qber();
    CheckLine::new("threshold_qber", format!("{q:.7}"), "|h2-0.5|", (h2(q) - 0.5).abs(), 1e-6)
}

fn diagonal_transform_regression(n: usize) -> CheckLine {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut dev = 0.0f64;
    for _ in 0..n {
        let sigma: f64 = rng.random_range(0.0..=1.0);
        let x2 = rng.random_range(1.0..4.0);
        let x1 = rng.random_range(-1.0..=1.0) * (x2 - 1.0);
        let x4 = rng.random_range(1.0..4.0);
        let x3 = rng.random_range(-1.0..=1.0) * (x4 - 1.0);
        let theta = rng.random_range(0.05..PI - 0.05);
        let p = CalibrationParams::new(x1, x2, x3, x4, theta).expect("sampled inside constraints");
        let out = transform(&diag(sigma), &p).expect("nonsingular angle");
        let symbolic = [
            [1.0, 0.0, 0.0],
            [x1, sigma * x2, 0.0],
            [x3, -sigma * x4 * theta.cos() / theta.sin(), sigma * x4 / theta.sin()],
        ];
        for (i, row) in symbolic.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                dev = dev.max((out.get(i, j) - v).abs());
            }
        }
    }
    CheckLine::new("diagonal_transform_regression", format!("{n} cases"), "max dev", dev, 1e-12)
}

fn data_for(state: &TwoQubitState, alice: [MeasurementModel; 2], bob: [MeasurementModel; 2]) -> DataMatrix {
    exact_data(&SimConfig {
        state: StateSpec::Explicit(*state),
        alice,
        bob,
        rounds: 1,
        seed: 0,
    })
    .expect("quantum data is feasible")
}

fn calibration_round_trip(n: usize) -> CheckLine {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut dev = 0.0f64;
    for _ in 0..n {
        let state = random_mixed_state(&mut rng);
        let n1 = random_axis(&mut rng);
        let n2 = orthogonal_partner(n1, random_axis(&mut rng)).expect("generic axes");
        let (e1, b1) = random_unsharpness(&mut rng, 0.05);
        let (e2, b2) = random_unsharpness(&mut rng, 0.05);
        let alice = [
            MeasurementModel::new(n1, e1, b1).expect("valid POVM"),
            MeasurementModel::new(n2, e2, b2).expect("valid POVM"),
        ];
        let bob = [random_measurement(&mut rng, 0.0), random_measurement(&mut rng, 0.0)];
        let p = true_calibration(&alice[0], &alice[1]).expect("orthogonal axes");
        let dbar = transform(&data_for(&state, alice, bob), &p).expect("nonsingular angle");
        let sharp = data_for(&state, [alice[0].sharpened(), alice[1].sharpened()], bob);
        dev = dev.max(dbar.max_abs_diff(&sharp));
    }
    CheckLine::new("calibration_round_trip", format!("{n} cases"), "max dev", dev, 1e-10)
}

fn headline_reproduction(points: usize) -> CheckLine {
    let forced = RateOptions {
        force_optimizer: true,
        ..Default::default()
    };
    let mut dev = 0.0f64;
    for i in 0..points {
        let q = 0.5 * i as f64 / (points - 1) as f64;
        let r = rate_from_data(&diag(1.0 - 2.0 * q), &forced).expect("diagonal data is feasible");
        dev = dev.max((r.rate - (1.0 - 2.0 * h2(q))).abs());
    }
    CheckLine::new("headline_reproduction", format!("{points} QBER points"), "max dev", dev, 1e-4)
}

/// Maximum of the disagreement bound over `(x4, theta)` on a uniform grid.
fn dense_grid_bound(sigma: f64, resolution: f64) -> f64 {
    let nx = (2.0 / resolution).round() as usize;
    let nt = (PI / resolution).floor() as usize;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=nx {
        let x4 = 1.0 + i as f64 * resolution;
        for k in 1..=nt {
            let theta = k as f64 * resolution;
            let (s, c) = theta.sin_cos();
            if s <= 0.0 {
                continue;
            }
            let t = sigma * x4 / s;
            let cross = sigma * x4 * c / s;
            if t > 1.0 || cross.abs() > 1.0 {
                continue;
            }
            best = best.max(h2((1.0 - t) / 2.0));
        }
    }
    best
}

fn grid_vs_optimizer(matrices: usize, resolution: f64) -> CheckLine {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut dev = 0.0f64;
    for _ in 0..matrices {
        let sigma: f64 = rng.random_range(0.0..1.0);
        let grid = dense_grid_bound(sigma, resolution);
        let opt = general_adversary_bound(&diag(sigma), &OptimizerSettings::default())
            .expect("diagonal data is feasible");
        dev = dev.max((grid - opt.bound).abs());
    }
    CheckLine::new(
        "grid_vs_optimizer",
        format!("{matrices} diagonal matrices at {resolution:.0e}"),
        "max dev",
        dev,
        1e-4,
    )
}

fn optimizer_dominance(matrices: usize, probes: usize) -> CheckLine {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let settings = OptimizerSettings::default();
    let mut worst = f64::NEG_INFINITY;
    let mut found_total = 0;
    for _ in 0..matrices {
        let state = random_mixed_state(&mut rng);
        let alice = [random_measurement(&mut rng, 0.2), random_measurement(&mut rng, 0.2)];
        let bob = [random_measurement(&mut rng, 0.2), random_measurement(&mut rng, 0.2)];
        let d = data_for(&state, alice, bob);
        let bound = general_adversary_bound(&d, &settings).expect("quantum data is feasible").bound;
        let mut found = 0;
        for attempt in 0..1_000_000usize {
            if found == probes {
                break;
            }
            let x_max = if attempt % 2 == 0 { settings.x_max } else { 1.5 };
            let x2 = rng.random_range(1.0..=x_max);
            let x4 = rng.random_range(1.0..=x_max);
            let p = CalibrationParams::new(
                rng.random_range(-1.0..=1.0) * (x2 - 1.0),
                x2,
                rng.random_range(-1.0..=1.0) * (x4 - 1.0),
                x4,
                rng.random_range(THETA_MARGIN..=PI - THETA_MARGIN),
            )
            .expect("sampled inside constraints");
            let dbar = transform(&d, &p).expect("nonsingular angle");
            if feasible(&dbar).is_feasible() {
                found += 1;
                let v = disagreement_entropy_bound(dbar.triple(2, 2)).expect("feasible entry");
                worst = worst.max(v - bound);
            }
        }
        found_total += found;
    }
    let mut line = CheckLine::new(
        "optimizer_dominance",
        format!("{matrices} matrices x {probes} probes"),
        "max probe-bound",
        worst,
        1e-12,
    );
    line.passed &= found_total == matrices * probes;
    line
}

fn monte_carlo_band(seeds: u64, required: u64) -> CheckLine {
    const TARGET: f64 = 0.427_206;
    const BAND: f64 = 0.02;
    let mut inside = 0;
    let mut worst = 0.0f64;
    for seed in 0..seeds {
        let est = run(&SimConfig::werner(0.9, 1_000_000, seed)).expect("valid config");
        let r = est
            .data_matrix()
            .and_then(|d| rate_from_data(&d, &RateOptions::default()))
            .map(|r| r.rate)
            .unwrap_or(f64::NEG_INFINITY);
        let dev = (r - TARGET).abs();
        worst = worst.max(dev);
        if dev <= BAND {
            inside += 1;
        }
    }
    let mut line = CheckLine::new(
        "monte_carlo_band",
        format!("{inside}/{seeds} seeds in band (need {required})"),
        "max |rate-0.427206|",
        worst,
        f64::INFINITY,
    );
    line.tolerance = BAND;
    line.passed = inside >= required;
    line
}

fn entropy_properties(n: usize) -> CheckLine {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..n {
        let w: [f64; 4] = std::array::from_fn(|_| -rng.random_range(f64::EPSILON..1.0f64).ln());
        let s: f64 = w.iter().sum();
        let j = JointDistribution::new([[w[0] / s, w[1] / s], [w[2] / s, w[3] / s]])
            .expect("normalized weights");
        let c = j.correlations();
        let rebuilt = joint_from_correlations(c).expect("valid triple");
        let fano = conditional_entropy(&rebuilt) - disagreement_entropy_bound(c).expect("in range");
        let chain = (mutual_information(&rebuilt) - (marginal_entropy_a(&rebuilt) - conditional_entropy(&rebuilt))).abs();
        worst = worst.max(fano).max(chain);
    }
    CheckLine::new("entropy_properties", format!("{n} random triples"), "max violation", worst, 1e-12)
}

pub fn run_all(deep: bool) -> Vec<CheckLine> {
    if deep {
        vec![
            threshold(),
            diagonal_transform_regression(20_000),
            calibration_round_trip(2_000),
            headline_reproduction(400),
            grid_vs_optimizer(20, 1e-3),
            optimizer_dominance(50, 100),
            monte_carlo_band(20, 19),
            entropy_properties(100_000),
        ]
    } else {
        vec![
            threshold(),
            diagonal_transform_regression(1_000),
            calibration_round_trip(200),
            headline_reproduction(100),
            grid_vs_optimizer(5, 1e-2),
            optimizer_dominance(10, 100),
            monte_carlo_band(3, 3),
            entropy_properties(10_000),
        ]
    }
}
