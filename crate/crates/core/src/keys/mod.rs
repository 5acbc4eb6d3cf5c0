//! Pauli one-time pad and symbolic key tracking through Clifford gates and
//! Bell-pair gadgets.

mod gadget;
mod pauli;
mod poly;
mod program;

pub use gadget::{
    rotated_bell_measurement, rotated_bell_measurement_forced, t_gate_gadget, BellOutcome,
    GadgetRecord,
};
pub use pauli::{
    keygen, qotp_decrypt, qotp_decrypt_state, qotp_encrypt, qotp_encrypt_state, PauliKey,
};
pub use poly::{evaluate_key_polynomial, Bindings, KeyPolynomial, Symbol};
pub use program::{
    build_key_update_program, classify, clifford_key_update, quasi_compactness_metrics, Axis,
    GadgetKind, GadgetSpec, GateClass, KeyUpdateProgram, QuasiCompactness, SymbolicKey,
};
