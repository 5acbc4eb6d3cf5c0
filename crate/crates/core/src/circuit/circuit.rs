use super::gate::{Gate, GateKind};
use crate::error::{Error, Result};
use crate::quantum::{CMatrix, StateVector};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Position of a T or T† gate in circuit order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TPosition {
    pub gate_index: usize,
    pub qubit: usize,
    pub kind: GateKind,
}

/// Ordered gate program on a fixed register. JSON form:
/// `{"qubits": n, "gates": [{"kind", "targets", "controls", "params"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRecord", into = "CircuitRecord")]
pub struct Circuit {
    qubit_count: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubit_count: usize) -> Self {
        Self {
            qubit_count,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(qubit_count: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Self::new(qubit_count);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if gate.max_qubit() >= self.qubit_count {
            return Err(Error::validation(format!(
                "{} touches qubit {} of a {}-qubit circuit",
                gate.kind(),
                gate.max_qubit(),
                self.qubit_count
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        for g in &other.gates {
            self.push(g.clone())?;
        }
        Ok(())
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        let mut c = Circuit::new(self.qubit_count.max(other.qubit_count));
        c.extend(self)?;
        c.extend(other)?;
        Ok(c)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn t_positions(&self) -> Vec<TPosition> {
        self.gates
            .iter()
            .enumerate()
            .filter(|(_, g)| g.kind().is_t_type())
            .map(|(i, g)| TPosition {
                gate_index: i,
                qubit: g.targets()[0],
                kind: g.kind(),
            })
            .collect()
    }

    /// Adjoint circuit: gates reversed and individually inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            qubit_count: self.qubit_count,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Dense unitary, built column by column from basis states.
    pub fn unitary(&self) -> CMatrix {
        let d = 1 << self.qubit_count;
        let mut u = CMatrix::zeros(d, d);
        for col in 0..d {
            let mut s = StateVector::basis(self.qubit_count, col);
            for g in &self.gates {
                s.apply_matrix(&g.base_matrix(), g.targets(), g.controls());
            }
            for (row, a) in s.amplitudes().iter().enumerate() {
                u[(row, col)] = *a;
            }
        }
        u
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitRecord {
    qubits: usize,
    gates: Vec<Gate>,
}

impl TryFrom<CircuitRecord> for Circuit {
    type Error = Error;

    fn try_from(r: CircuitRecord) -> Result<Self> {
        Circuit::from_gates(r.qubits, r.gates)
    }
}

impl From<Circuit> for CircuitRecord {
    fn from(c: Circuit) -> Self {
        CircuitRecord {
            qubits: c.qubit_count,
            gates: c.gates,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::gate::gates::*;
    use super::*;

    #[test]
    fn t_positions_enumerate_t_gates_in_order() {
        let c = Circuit::from_gates(2, [t(0), h(0), cnot(0, 1), tdg(1), s(1)]).unwrap();
        let pos = c.t_positions();
        assert_eq!(pos.len(), 2);
        assert_eq!((pos[0].gate_index, pos[0].qubit), (0, 0));
        assert_eq!((pos[1].gate_index, pos[1].qubit, pos[1].kind), (3, 1, GateKind::Tdg));
    }

    #[test]
    fn out_of_range_gate_rejected() {
        let mut c = Circuit::new(1);
        assert!(c.push(cnot(0, 1)).is_err());
        assert!(Circuit::from_json(r#"{"qubits": 1, "gates": [{"kind": "H", "targets": [3]}]}"#).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = Circuit::from_gates(3, [h(0), cnot(0, 2), ry(1, 0.25), u3(2, 0.1, 0.2, 0.3)]).unwrap();
        let back = Circuit::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
        let v: serde_json::Value = serde_json::from_str(&c.to_json().unwrap()).unwrap();
        assert_eq!(v["qubits"], 3);
    }
}
