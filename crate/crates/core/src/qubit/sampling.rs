//! Random states and measurements for property tests and self-checks.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::linalg::{projector, CMat4};
use super::{MeasurementModel, TwoQubitState};

/// Haar-distributed pure two-qubit state vector.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R) -> [Complex64; 4] {
    let mut psi = [Complex64::new(0.0, 0.0); 4];
    for c in &mut psi {
        *c = Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
    }
    let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    psi.map(|c| c / norm)
}

/// Mixture of `rank` random pure states with flat-Dirichlet weights.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> TwoQubitState {
    let rank = rank.max(1);
    let weights: Vec<f64> = (0..rank).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = CMat4::zeros();
    for w in weights {
        rho = rho + projector(&random_pure(rng)).scale(w / total);
    }
    // re-symmetrize and renormalize against rounding
    let rho = (rho + rho.dagger()).scale(0.5);
    let tr = rho.trace().re;
    TwoQubitState::new(rho.scale(1.0 / tr)).expect("convex mixture of pure states is a state")
}

/// Random state of random rank in `1..=4`.
pub fn random_mixed_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    let rank = rng.random_range(1..=4);
    random_state(rng, rank)
}

pub fn random_axis<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            return v.map(|c| c / n);
        }
    }
}

/// Random valid (sharpness, bias) with sharpness at least `min_sharpness`.
pub fn random_unsharpness<R: Rng + ?Sized>(rng: &mut R, min_sharpness: f64) -> (f64, f64) {
    let eta = rng.random_range(min_sharpness..=1.0);
    let slack = 1.0 - eta;
    let bias = if slack > 0.0 {
        rng.random_range(-slack..=slack)
    } else {
        0.0
    };
    (eta, bias)
}

pub fn random_measurement<R: Rng + ?Sized>(rng: &mut R, min_sharpness: f64) -> MeasurementModel {
    let (eta, bias) = random_unsharpness(rng, min_sharpness);
    MeasurementModel::along(random_axis(rng), eta, bias).expect("sampled inside the POVM region")
}
