use super::evolution::hamiltonian_exponential;
use crate::circuit::{gates, inverse_qft, Circuit, Gate};
use crate::error::{Error, Result};
use crate::quantum::{eigendecompose, DensityMatrix};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Qubit layout shared by every QPCE stage. The encoded `vec(ρ)` occupies
/// `0..2n` (column index low, row index high), the phase register follows
/// least-significant bit first, then one ancilla.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QpceLayout {
    pub data_qubits: usize,
    pub register_bits: usize,
}

impl QpceLayout {
    pub fn new(data_qubits: usize, register_bits: usize) -> Self {
        Self {
            data_qubits,
            register_bits,
        }
    }

    /// Column-index qubits of `vec(ρ)`.
    pub fn column(&self) -> Vec<usize> {
        (0..self.data_qubits / 2).collect()
    }

    /// Row-index qubits of `vec(ρ)`; phase estimation acts here.
    pub fn row(&self) -> Vec<usize> {
        (self.data_qubits / 2..self.data_qubits).collect()
    }

    pub fn data(&self) -> Vec<usize> {
        (0..self.data_qubits).collect()
    }

    pub fn register(&self) -> Vec<usize> {
        (self.data_qubits..self.data_qubits + self.register_bits).collect()
    }

    pub fn ancilla(&self) -> usize {
        self.data_qubits + self.register_bits
    }

    pub fn total(&self) -> usize {
        self.data_qubits + self.register_bits + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseEstimationConfig {
    pub precision_bits: usize,
    /// `t0`: the register value `m` stands for the eigenvalue `2πm/t0`.
    pub evolution_time: f64,
}

impl Default for PhaseEstimationConfig {
    fn default() -> Self {
        Self {
            precision_bits: 2,
            evolution_time: 2.0 * PI,
        }
    }
}

impl PhaseEstimationConfig {
    pub fn new(precision_bits: usize, evolution_time: f64) -> Result<Self> {
        let cfg = Self {
            precision_bits,
            evolution_time,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=16).contains(&self.precision_bits) {
            return Err(Error::validation(format!(
                "precision bits must be in 1..=16, got {}",
                self.precision_bits
            )));
        }
        if !(self.evolution_time.is_finite() && self.evolution_time > 0.0) {
            return Err(Error::validation("evolution time must be positive"));
        }
        Ok(())
    }

    pub fn slices(&self) -> usize {
        1 << self.precision_bits
    }

    /// Eigenvalue represented by register value `m`.
    pub fn eigenvalue_of(&self, m: usize) -> f64 {
        2.0 * PI * m as f64 / self.evolution_time
    }

    /// Exact (fractional) register reading for eigenvalue `lambda`.
    pub fn reading_of(&self, lambda: f64) -> f64 {
        lambda * self.evolution_time / (2.0 * PI)
    }
}

/// Emitted when some eigenvalue does not land on a register value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationWarning {
    pub eigenvalue: f64,
    pub reading: f64,
    /// Distance from the nearest representable reading, in register units.
    pub phase_error: f64,
}

#[derive(Debug, Clone)]
pub struct PhaseEstimation {
    pub circuit: Circuit,
    pub warnings: Vec<QuantizationWarning>,
}

/// Phase estimation of `e^{iρ t0}` on the row half of the encoded state:
/// register qubit `k` controls `e^{iρ t0 2^k / T}`, then an inverse QFT.
pub fn build_phase_estimation(rho: &DensityMatrix, cfg: &PhaseEstimationConfig) -> Result<PhaseEstimation> {
    cfg.validate()?;
    let n = rho.qubit_count();
    let layout = QpceLayout::new(2 * n, cfg.precision_bits);
    let register = layout.register();
    let row = layout.row();
    let mut circuit = Circuit::new(layout.total());
    for &r in &register {
        circuit.push(gates::h(r))?;
    }
    let slices = cfg.slices() as f64;
    for (k, &r) in register.iter().enumerate() {
        let t = cfg.evolution_time * (1u64 << k) as f64 / slices;
        let u = hamiltonian_exponential(rho.entries(), t)?;
        circuit.push(Gate::matrix(u, row.clone(), vec![r])?)?;
    }
    for g in inverse_qft(&register) {
        circuit.push(g)?;
    }
    let eig = eigendecompose(rho)?;
    let warnings = eig
        .eigenvalues
        .iter()
        .filter(|l| **l > 1e-12)
        .filter_map(|&l| {
            let reading = cfg.reading_of(l);
            let nearest = reading.round().clamp(0.0, slices - 1.0);
            let phase_error = (reading - nearest).abs();
            (phase_error > 1e-9).then_some(QuantizationWarning {
                eigenvalue: l,
                reading,
                phase_error,
            })
        })
        .collect();
    Ok(PhaseEstimation { circuit, warnings })
}
