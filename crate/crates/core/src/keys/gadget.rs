use super::program::GadgetKind;
use crate::circuit::{gates, measure_forced, measure_qubits, Gate};
use crate::error::{Error, Result};
use crate::quantum::{SimRng, StateVector};
use serde::{Deserialize, Serialize};

/// Qubits of gadget `index`: the data qubit it acts on and the two halves of
/// its Bell pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetRecord {
    pub index: usize,
    pub data_qubit: usize,
    pub client_half: usize,
    pub server_half: usize,
}

impl GadgetRecord {
    pub fn new(index: usize, data_qubit: usize, client_half: usize, server_half: usize) -> Result<Self> {
        if data_qubit == client_half || data_qubit == server_half || client_half == server_half {
            return Err(Error::validation(format!(
                "gadget {index} needs three distinct qubits, got ω={data_qubit} c={client_half} s={server_half}"
            )));
        }
        Ok(Self {
            index,
            data_qubit,
            client_half,
            server_half,
        })
    }

    /// `|β₀₀⟩` on `(c, s)` from `|00⟩`.
    pub fn bell_pair_gates(&self) -> Vec<Gate> {
        vec![gates::h(self.client_half), gates::cnot(self.client_half, self.server_half)]
    }

    /// Server side: the gate on `ω`, then `SWAP(ω, s)`.
    pub fn server_gates(&self, kind: GadgetKind) -> Vec<Gate> {
        vec![
            kind.server_gate(self.data_qubit),
            gates::swap(self.data_qubit, self.server_half),
        ]
    }

    /// Client side: basis rotation on `s`, then the Bell-basis reduction
    /// `CNOT(s→c)`, `H(s)`. Measuring `[s, c]` afterwards yields `(r_b, r_a)`.
    pub fn measurement_gates(&self, kind: GadgetKind, h: u8) -> Vec<Gate> {
        let mut out: Vec<Gate> = kind.basis_gate(self.server_half, h).into_iter().collect();
        out.push(gates::cnot(self.server_half, self.client_half));
        out.push(gates::h(self.server_half));
        out
    }

    /// Measurement order: bit 0 is `s` (→ `r_b`), bit 1 is `c` (→ `r_a`).
    pub fn measured_qubits(&self) -> [usize; 2] {
        [self.server_half, self.client_half]
    }

    pub fn outcome(&self, measured: usize) -> BellOutcome {
        BellOutcome {
            gadget_index: self.index,
            r_a: ((measured >> 1) & 1) as u8,
            r_b: (measured & 1) as u8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BellOutcome {
    pub gadget_index: usize,
    pub r_a: u8,
    pub r_b: u8,
}

impl BellOutcome {
    /// Inverse of [`GadgetRecord::outcome`].
    pub fn measured_value(&self) -> usize {
        usize::from(self.r_b) | usize::from(self.r_a) << 1
    }
}

fn apply(state: &StateVector, gs: &[Gate]) -> StateVector {
    let mut out = state.clone();
    for g in gs {
        out.apply_matrix(&g.base_matrix(), g.targets(), g.controls());
    }
    out
}

/// Applies the server half of a gadget to a state whose Bell pair is
/// already prepared.
pub fn t_gate_gadget(state: &StateVector, rec: &GadgetRecord, kind: GadgetKind) -> StateVector {
    apply(state, &rec.server_gates(kind))
}

/// Measures `(s, c)` in the rotated Bell basis selected by `a_bit`.
pub fn rotated_bell_measurement(
    state: &StateVector,
    rec: &GadgetRecord,
    kind: GadgetKind,
    a_bit: u8,
    rng: &mut SimRng,
) -> Result<(StateVector, BellOutcome)> {
    let rotated = apply(state, &rec.measurement_gates(kind, a_bit));
    let m = measure_qubits(&rotated, &rec.measured_qubits(), rng)?;
    Ok((m.collapsed, rec.outcome(m.outcome)))
}

/// As [`rotated_bell_measurement`] with a chosen outcome; also returns its
/// probability.
pub fn rotated_bell_measurement_forced(
    state: &StateVector,
    rec: &GadgetRecord,
    kind: GadgetKind,
    a_bit: u8,
    outcome: BellOutcome,
) -> Result<(StateVector, f64)> {
    let rotated = apply(state, &rec.measurement_gates(kind, a_bit));
    let m = measure_forced(&rotated, &rec.measured_qubits(), outcome.measured_value())?;
    Ok((m.collapsed, m.probability))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keys::program::Axis;
    use crate::keys::{qotp_encrypt_state, PauliKey};
    use crate::quantum::{equal_up_to_phase, seeded_rng, C64};
    use rand::Rng;

    fn random_qubit(rng: &mut SimRng) -> StateVector {
        let amps = (0..2)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        StateVector::subnormalized(amps).unwrap().normalized().unwrap()
    }

    fn record() -> GadgetRecord {
        GadgetRecord::new(1, 0, 1, 2).unwrap()
    }

    /// Data on qubit 0 of a 3-qubit register with the pair on (1, 2).
    fn with_pair(psi: &StateVector) -> StateVector {
        let pair = apply(&StateVector::zero(3), &record().bell_pair_gates());
        let mut amps = vec![C64::default(); 8];
        for (i, a) in pair.amplitudes().iter().enumerate() {
            if i & 1 == 0 {
                amps[i] = *a * psi.amplitudes()[0];
                amps[i | 1] = *a * psi.amplitudes()[1];
            }
        }
        StateVector::new(amps).unwrap()
    }

    fn check_kind(kind: GadgetKind, rng: &mut SimRng) {
        let rec = record();
        let psi = random_qubit(rng);
        let target = apply(&psi, &[kind.server_gate(0)]);
        for key in PauliKey::all(1) {
            let enc = qotp_encrypt_state(&psi, &key).unwrap();
            let (a, b) = (key.a[0], key.b[0]);
            let sym_a = crate::keys::KeyPolynomial::from_terms(a, []);
            let sym_b = crate::keys::KeyPolynomial::from_terms(b, []);
            let h = kind.basis_bit(&sym_a, &sym_b).constant;
            let after = t_gate_gadget(&with_pair(&enc), &rec, kind);
            for m in 0..4 {
                let outcome = rec.outcome(m);
                let (post, p) = rotated_bell_measurement_forced(&after, &rec, kind, h, outcome).unwrap();
                assert!((p - 0.25).abs() < 1e-12);
                let data = post.remove_qubits(&[1, 2], m >> 1 | (m & 1) << 1).normalized().unwrap();
                let (na, nb) = kind.update(&sym_a, &sym_b, 1);
                let mut bind = crate::keys::Bindings::new();
                bind.bind_outcome(1, outcome.r_a, outcome.r_b);
                let k2 = PauliKey::new(vec![na.evaluate(&bind).unwrap()], vec![nb.evaluate(&bind).unwrap()]).unwrap();
                let expect = qotp_encrypt_state(&target, &k2).unwrap();
                assert!(
                    equal_up_to_phase(data.amplitudes(), expect.amplitudes(), 1e-10),
                    "{kind:?} key=({a},{b}) m={m}"
                );
            }
        }
    }

    #[test]
    fn gadgets_teleport_with_tracked_keys() {
        let mut rng = seeded_rng(11);
        let kinds = [
            GadgetKind::T,
            GadgetKind::TDagger,
            GadgetKind::Rotation { axis: Axis::X, angle: 0.7 },
            GadgetKind::Rotation { axis: Axis::Y, angle: -1.3 },
            GadgetKind::Rotation { axis: Axis::Z, angle: 2.1 },
        ];
        for _ in 0..50 {
            for kind in kinds {
                check_kind(kind, &mut rng);
            }
        }
    }

    #[test]
    fn plain_teleport_is_uniform_and_seeded() {
        let rec = record();
        let id = GadgetKind::Rotation { axis: Axis::Z, angle: 0.0 };
        let mut rng = seeded_rng(5);
        let psi = random_qubit(&mut rng);
        let after = t_gate_gadget(&with_pair(&psi), &rec, id);
        let mut counts = [0u32; 4];
        let mut r1 = seeded_rng(9);
        let mut r2 = seeded_rng(9);
        for _ in 0..4000 {
            let (_, o) = rotated_bell_measurement(&after, &rec, id, 0, &mut r1).unwrap();
            let (_, o2) = rotated_bell_measurement(&after, &rec, id, 0, &mut r2).unwrap();
            assert_eq!(o, o2);
            counts[o.measured_value()] += 1;
        }
        assert!(counts.iter().all(|&c| (900..1100).contains(&c)), "{counts:?}");
    }

    #[test]
    fn record_requires_distinct_qubits() {
        assert!(GadgetRecord::new(1, 0, 0, 2).is_err());
        let rec = record();
        for m in 0..4 {
            assert_eq!(rec.outcome(m).measured_value(), m);
        }
    }
}
