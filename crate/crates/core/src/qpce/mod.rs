//! Quantum principal component extraction on simulated circuits.

mod dataset;
mod evolution;
mod demo;
mod io;
mod phase;
mod pipeline;
mod threshold;

pub use dataset::{amplitude_encode, covariance_density, encode_density, Dataset};
pub use evolution::{
    exact_evolution, first_order, hamiltonian_exponential, swap_trick_evolve, swap_trick_step,
};
pub use demo::{
    build_demo_circuit, DemoCircuit, HARDWARE_FIDELITY, RATIO_TARGET,
    HARDWARE_FREQUENCIES, HARDWARE_OUTPUT, DEMO_RY_ANGLE, DEMO_THETA1, DEMO_THETA2,
};
pub use io::{read_density_csv, write_density_csv};
pub use phase::{
    build_phase_estimation, PhaseEstimation, PhaseEstimationConfig, QpceLayout, QuantizationWarning,
};
pub use pipeline::{classical_pca_oracle, expected_postselect_probability, run_qpce, QpceResult};
pub use threshold::{build_threshold_rotation, rotation_amplitudes, Interpretation, ThresholdConfig};
