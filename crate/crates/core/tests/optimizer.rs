//! Dominance of the optimizer on strongly correlated data, where the bound is
//! well below one bit and a poor search would show.

use std::f64::consts::{FRAC_PI_2, PI};

use qkdrate_core::calibration::feasible;
use qkdrate_core::keyrate::optimizer::THETA_MARGIN;
use qkdrate_core::qubit::sampling::random_unsharpness;
use qkdrate_core::{
    disagreement_entropy_bound, exact_data, general_adversary_bound, rate_from_data, true_calibration,
    transform, CalibrationParams, DataMatrix, MeasurementModel, OptimizerSettings, RateOptions, SimConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tilted(angle: f64) -> [f64; 3] {
    [angle.sin(), 0.0, angle.cos()]
}

fn correlated_config(rng: &mut ChaCha8Rng) -> SimConfig {
    let v = rng.random_range(0.85..1.0);
    let (eta1, b1) = random_unsharpness(rng, 0.85);
    let (eta2, b2) = random_unsharpness(rng, 0.85);
    let alice = [
        MeasurementModel::new(tilted(rng.random_range(-0.15..0.15)), eta1, b1).unwrap(),
        MeasurementModel::new(tilted(FRAC_PI_2 + rng.random_range(-0.15..0.15)), eta2, b2).unwrap(),
    ];
    SimConfig {
        alice,
        ..SimConfig::werner(v, 1, 0)
    }
}

fn objective(d: &DataMatrix, p: &CalibrationParams) -> Option<f64> {
    let dbar = transform(d, p).ok()?;
    feasible(&dbar)
        .is_feasible()
        .then(|| disagreement_entropy_bound(dbar.triple(2, 2)).unwrap())
}

fn perturb(rng: &mut ChaCha8Rng, p: &CalibrationParams, scale: f64) -> Option<CalibrationParams> {
    let x2 = (p.x2() + rng.random_range(-scale..scale)).max(1.0);
    let x1 = (p.x1() + rng.random_range(-scale..scale)).clamp(-(x2 - 1.0), x2 - 1.0);
    let x4 = (p.x4() + rng.random_range(-scale..scale)).max(1.0);
    let x3 = (p.x3() + rng.random_range(-scale..scale)).clamp(-(x4 - 1.0), x4 - 1.0);
    let theta = (p.theta() + rng.random_range(-scale..scale)).clamp(THETA_MARGIN, PI - THETA_MARGIN);
    CalibrationParams::new(x1, x2, x3, x4, theta).ok()
}

#[test]
fn optimum_dominates_local_and_global_probes() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let settings = OptimizerSettings::default();
    for _ in 0..30 {
        let cfg = correlated_config(&mut rng);
        let d = exact_data(&cfg).unwrap();
        let best = general_adversary_bound(&d, &settings).unwrap();
        assert!(best.bound < 0.9, "expected a non-saturated bound, got {}", best.bound);

        // the physical calibration is one feasible point
        let truth = true_calibration(&cfg.alice[0], &cfg.alice[1]).unwrap();
        if let Some(v) = objective(&d, &truth) {
            assert!(v <= best.bound + 1e-12);
        }

        for scale in [1e-2, 1e-4, 1e-6] {
            for _ in 0..200 {
                if let Some(p) = perturb(&mut rng, &best.params, scale) {
                    if let Some(v) = objective(&d, &p) {
                        assert!(v <= best.bound + 1e-9, "probe {p:?} gives {v} > {}", best.bound);
                    }
                }
            }
        }
    }
}

#[test]
fn unsharp_werner_bound_dominates_true_calibration() {
    // eta_a = 0.8, b = 0.1 on Alice's first measurement, Werner v = 0.95
    let mut cfg = SimConfig::werner(0.95, 1, 0);
    cfg.alice[0] = MeasurementModel::new([0.0, 0.0, 1.0], 0.8, 0.1).unwrap();
    let d = exact_data(&cfg).unwrap();
    let best = general_adversary_bound(&d, &OptimizerSettings::default()).unwrap();
    let truth = true_calibration(&cfg.alice[0], &cfg.alice[1]).unwrap();
    let at_truth = objective(&d, &truth).expect("true calibration is feasible");
    assert!(best.bound >= at_truth);
}

#[test]
fn noise_scaling_never_increases_rate_on_unsharp_data() {
    let mut cfg = SimConfig::werner(0.97, 1, 0);
    cfg.alice[0] = MeasurementModel::new([0.0, 0.0, 1.0], 0.9, 0.0).unwrap();
    cfg.alice[1] = MeasurementModel::new([1.0, 0.0, 0.0], 0.95, 0.0).unwrap();
    let forced = RateOptions {
        force_optimizer: true,
        ..Default::default()
    };
    let base = exact_data(&cfg).unwrap();
    let mut last = rate_from_data(&base, &forced).unwrap().rate;
    for lambda in [0.98, 0.95, 0.9, 0.8] {
        let mut rows = *base.rows();
        for row in rows.iter_mut().skip(1) {
            for v in row.iter_mut() {
                *v *= lambda;
            }
        }
        let r = rate_from_data(&DataMatrix::new(rows).unwrap(), &forced).unwrap().rate;
        assert!(r <= last + 1e-9, "lambda {lambda}: {r} > {last}");
        last = r;
    }
}

#[test]
fn theta_stays_inside_margin() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..10 {
        let d = exact_data(&correlated_config(&mut rng)).unwrap();
        let b = general_adversary_bound(&d, &OptimizerSettings::default()).unwrap();
        let [lo, hi] = b.trace.theta_range;
        assert!(lo >= THETA_MARGIN && hi <= PI - THETA_MARGIN);
        assert!(b.params.theta() >= THETA_MARGIN && b.params.theta() <= PI - THETA_MARGIN);
    }
}
