//! Gate-level circuits and exact simulation.

#[allow(clippy::module_inception)]
mod circuit;
mod compile;
mod gate;
mod qft;
mod sim;

pub use circuit::{Circuit, TPosition};
pub use compile::{compile_for_qhe, is_trackable, zyz_decompose, ZyzAngles};
pub use gate::{gate_matrix, gates, rx, ry, rz, u3, Gate, GateKind};
pub use qft::{inverse_qft, qft};
pub use sim::{
    measure_forced, measure_qubits, postselect, simulate_density, simulate_statevector,
    Measurement, BRANCH_FLOOR,
};
