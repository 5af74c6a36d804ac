//! Fixed inputs shared by the benchmarks.

use qkdrate_core::{
    diagonal_data, exact_data, DataMatrix, MeasurementModel, SimConfig, StateSpec, SymmetricObservation,
};

/// Symmetric observation at the given QBER.
pub fn diagonal(qber: f64) -> DataMatrix {
    diagonal_data(SymmetricObservation::from_qber(qber).expect("qber in [0, 0.5]"))
}

/// Werner state measured with unsharp, biased, non-orthogonal settings on Alice's side.
pub fn unsharp_config(rounds: u64, seed: u64) -> SimConfig {
    let angle: f64 = 1.3;
    SimConfig {
        state: StateSpec::Werner { visibility: 0.92 },
        alice: [
            MeasurementModel::new([0.0, 0.0, 1.0], 0.95, 0.02).expect("valid POVM"),
            MeasurementModel::new([angle.sin(), 0.0, angle.cos()], 0.9, -0.03).expect("valid POVM"),
        ],
        bob: [MeasurementModel::ideal_z(), MeasurementModel::ideal_x()],
        rounds,
        seed,
    }
}

/// Exact data matrix of [`unsharp_config`].
pub fn unsharp_data() -> DataMatrix {
    exact_data(&unsharp_config(1, 0)).expect("quantum data is feasible")
}
