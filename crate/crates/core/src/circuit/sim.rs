use super::Circuit;
use crate::error::{Error, Result};
use crate::quantum::{DensityMatrix, SimRng, StateVector};
use rand::Rng;

/// Branch probabilities below this are treated as impossible.
pub const BRANCH_FLOOR: f64 = 1e-12;

pub fn simulate_statevector(circuit: &Circuit, input: &StateVector) -> Result<StateVector> {
    if input.qubit_count() != circuit.qubit_count() {
        return Err(Error::DimensionMismatch {
            expected: circuit.qubit_count(),
            found: input.qubit_count(),
        });
    }
    let mut state = input.clone();
    for g in circuit.gates() {
        state.apply_matrix(&g.base_matrix(), g.targets(), g.controls());
    }
    Ok(state)
}

pub fn simulate_density(circuit: &Circuit, input: &DensityMatrix) -> Result<DensityMatrix> {
    if input.qubit_count() != circuit.qubit_count() {
        return Err(Error::DimensionMismatch {
            expected: circuit.qubit_count(),
            found: input.qubit_count(),
        });
    }
    let mut rho = input.clone();
    for g in circuit.gates() {
        rho.apply_matrix(&g.base_matrix(), g.targets(), g.controls());
    }
    Ok(rho)
}

#[derive(Debug, Clone)]
pub struct Measurement {
    /// `bits[k]` is the outcome of `qubits[k]`.
    pub bits: Vec<u8>,
    pub outcome: usize,
    pub collapsed: StateVector,
    pub probability: f64,
}

/// Born-rule measurement of `qubits`; the collapsed state is renormalized.
pub fn measure_qubits(state: &StateVector, qubits: &[usize], rng: &mut SimRng) -> Result<Measurement> {
    check_qubits(state, qubits)?;
    let probs = state.marginal_probabilities(qubits);
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    let total: f64 = probs.iter().sum();
    for p in &probs {
        acc += p / total;
        cumulative.push(acc);
    }
    let outcome = crate::quantum::sampling_draw(&cumulative, &probs, rng.random::<f64>());
    collapse(state, qubits, outcome)
}

/// Projects onto a chosen outcome; used for exhaustive branch analysis.
pub fn measure_forced(state: &StateVector, qubits: &[usize], outcome: usize) -> Result<Measurement> {
    check_qubits(state, qubits)?;
    collapse(state, qubits, outcome)
}

fn collapse(state: &StateVector, qubits: &[usize], outcome: usize) -> Result<Measurement> {
    let (branch, probability) = state.project(qubits, outcome);
    if probability < BRANCH_FLOOR {
        return Err(Error::Invariant(format!(
            "sampled outcome {outcome} has probability {probability:.3e}"
        )));
    }
    let collapsed = branch.normalized()?;
    Ok(Measurement {
        bits: (0..qubits.len()).map(|k| ((outcome >> k) & 1) as u8).collect(),
        outcome,
        collapsed,
        probability,
    })
}

fn check_qubits(state: &StateVector, qubits: &[usize]) -> Result<()> {
    if qubits.is_empty() {
        return Err(Error::validation("no qubits to measure"));
    }
    if let Some(&q) = qubits.iter().find(|&&q| q >= state.qubit_count()) {
        return Err(Error::validation(format!("qubit {q} out of range")));
    }
    Ok(())
}

/// Keeps the branch where `qubit == value` and renormalizes it.
pub fn postselect(state: &StateVector, qubit: usize, value: u8) -> Result<(StateVector, f64)> {
    if qubit >= state.qubit_count() {
        return Err(Error::validation(format!("qubit {qubit} out of range")));
    }
    let (branch, p) = state.project(&[qubit], value as usize);
    if p < BRANCH_FLOOR {
        return Err(Error::PostSelectionImpossible { probability: p });
    }
    Ok((branch.normalized()?, p))
}

#[cfg(test)]
mod tests {
    use super::super::gate::gates::*;
    use super::*;
    use crate::quantum::{real, seeded_rng, CMatrix};

    fn bell() -> StateVector {
        let c = Circuit::from_gates(2, [h(0), cnot(0, 1)]).unwrap();
        simulate_statevector(&c, &StateVector::zero(2)).unwrap()
    }

    #[test]
    fn bell_preparation() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expect = StateVector::new(vec![real(r), real(0.0), real(0.0), real(r)]).unwrap();
        assert!(bell().inner(&expect).unwrap().norm() > 1.0 - 1e-15);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let s = StateVector::from_real(&[0.6, 0.8]).unwrap();
        assert_eq!(simulate_statevector(&Circuit::new(1), &s).unwrap(), s);
        assert!(simulate_statevector(&Circuit::new(2), &s).is_err());
    }

    #[test]
    fn density_bit_flip_and_mixed_fixed_point() {
        let c = Circuit::from_gates(1, [x(0)]).unwrap();
        let out = simulate_density(&c, &DensityMatrix::from_pure(&StateVector::zero(1))).unwrap();
        assert!((out.entries()[(1, 1)].re - 1.0).abs() < 1e-15);
        let c = Circuit::from_gates(2, [h(0), t(1), cnot(1, 0), ry(0, 0.3)]).unwrap();
        let mm = DensityMatrix::maximally_mixed(2);
        assert!(simulate_density(&c, &mm).unwrap().max_abs_diff(&mm) < 1e-14);
    }

    #[test]
    fn measuring_one() {
        let mut rng = seeded_rng(0);
        let m = measure_qubits(&StateVector::basis(1, 1), &[0], &mut rng).unwrap();
        assert_eq!(m.bits, vec![1]);
        assert!((m.probability - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_collapse() {
        let m = measure_forced(&bell(), &[0], 0).unwrap();
        assert!((m.probability - 0.5).abs() < 1e-15);
        assert!((m.collapsed.amplitudes()[0].re - 1.0).abs() < 1e-15);
        assert!(measure_forced(&StateVector::zero(1), &[0], 1).is_err());
    }

    #[test]
    fn seeded_measurement_replay() {
        let run = |seed| {
            let mut rng = seeded_rng(seed);
            (0..32)
                .map(|_| measure_qubits(&bell(), &[0, 1], &mut rng).unwrap().outcome)
                .collect::<Vec<_>>()
        };
        assert_eq!(run(5), run(5));
    }

    #[test]
    fn postselection_cases() {
        let (s, p) = postselect(&StateVector::zero(1), 0, 0).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(s, StateVector::zero(1));
        let (s, p) = postselect(&bell(), 0, 1).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!((s.amplitudes()[3].re - 1.0).abs() < 1e-15);
        assert!(matches!(
            postselect(&StateVector::zero(1), 0, 1),
            Err(Error::PostSelectionImpossible { .. })
        ));
    }

    #[test]
    fn postselect_rotated_ancilla_amplitude() {
        // threshold-rotation branch for λ = 1, τ = 0.8, η = 1
        let amp: f64 = 1.0 * (1.0 - 0.8) / 1.0;
        let theta = 2.0 * amp.asin();
        let c = Circuit::from_gates(1, [ry(0, theta)]).unwrap();
        let s = simulate_statevector(&c, &StateVector::zero(1)).unwrap();
        let (_, p) = postselect(&s, 0, 1).unwrap();
        assert!((p.sqrt() - 0.2).abs() < 1e-12);
        let (_, q) = postselect(&s, 0, 0).unwrap();
        assert!((p + q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_and_statevector_paths_agree() {
        let c = Circuit::from_gates(2, [h(0), t(0), cnot(0, 1), sdg(1), rx(0, 0.4)]).unwrap();
        let psi = StateVector::from_real(&[0.5, 0.5, 0.5, 0.5]).unwrap();
        let out = simulate_statevector(&c, &psi).unwrap();
        let rho = simulate_density(&c, &DensityMatrix::from_pure(&psi)).unwrap();
        let diff: CMatrix = rho.entries() - out.outer();
        assert!(diff.iter().all(|z| z.norm() < 1e-10));
    }
}
