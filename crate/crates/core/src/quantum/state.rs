use super::{c, is_power_of_two, log2_exact, CMatrix, C64, TOLERANCE};
use crate::error::{Error, Result};
use crate::exec::Exec;
use serde::{Deserialize, Serialize};

/// Pure state of `qubit_count` qubits in the computational basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amplitudes: Vec<C64>,
    qubit_count: usize,
}

impl StateVector {
    /// Builds a normalized state; fails if the length is not a power of two
    /// or the squared norm is off by more than 1e-9.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let state = Self::subnormalized(amplitudes)?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::validation(format!(
                "state is not normalized (squared norm {norm})"
            )));
        }
        Ok(state)
    }

    /// Builds a state without the normalization check, e.g. a post-selection
    /// branch before renormalizing.
    pub fn subnormalized(amplitudes: Vec<C64>) -> Result<Self> {
        let qubit_count = log2_exact(amplitudes.len()).ok_or_else(|| {
            Error::validation(format!(
                "amplitude count {} is not a power of two",
                amplitudes.len()
            ))
        })?;
        Ok(Self {
            amplitudes,
            qubit_count,
        })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| c(x, 0.0)).collect())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(qubit_count: usize, index: usize) -> Self {
        let mut amplitudes = vec![C64::default(); 1 << qubit_count];
        amplitudes[index] = c(1.0, 0.0);
        Self {
            amplitudes,
            qubit_count,
        }
    }

    pub fn zero(qubit_count: usize) -> Self {
        Self::basis(qubit_count, 0)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= TOLERANCE
    }

    /// Rescales to unit norm. Fails on a (numerically) zero vector.
    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm < 1e-15 {
            return Err(Error::validation("cannot normalize a zero vector"));
        }
        for a in &mut self.amplitudes {
            *a /= norm;
        }
        Ok(self)
    }

    /// `self ⊗ other`: `other` occupies the low-order qubits.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        StateVector {
            amplitudes,
            qubit_count: self.qubit_count + other.qubit_count,
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Applies `matrix` to `targets` (targets[0] is the least significant bit
    /// of the matrix index), conditioned on every qubit in `controls` being 1.
    pub fn apply_matrix(&mut self, matrix: &CMatrix, targets: &[usize], controls: &[usize]) {
        let exec = Exec::for_len(self.dim());
        self.apply_matrix_with(exec, matrix, targets, controls);
    }

    pub fn apply_matrix_with(
        &mut self,
        exec: Exec,
        matrix: &CMatrix,
        targets: &[usize],
        controls: &[usize],
    ) {
        self.amplitudes = apply_gate(&self.amplitudes, matrix, targets, controls, exec);
    }

    /// Probability of each outcome of measuring `qubits`; outcome `m` has bit
    /// `k` equal to the value of `qubits[k]`.
    pub fn marginal_probabilities(&self, qubits: &[usize]) -> Vec<f64> {
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            probs[gather_bits(i, qubits)] += a.norm_sqr();
        }
        probs
    }

    /// Projects onto `qubits = bits` without renormalizing; returns the branch
    /// and its probability.
    pub fn project(&self, qubits: &[usize], outcome: usize) -> (StateVector, f64) {
        let mut amplitudes = self.amplitudes.clone();
        let mut prob = 0.0;
        for (i, a) in amplitudes.iter_mut().enumerate() {
            if gather_bits(i, qubits) == outcome {
                prob += a.norm_sqr();
            } else {
                *a = C64::default();
            }
        }
        (
            StateVector {
                amplitudes,
                qubit_count: self.qubit_count,
            },
            prob,
        )
    }

    /// Drops `qubits`, keeping the amplitudes where they equal `outcome`.
    /// Remaining qubits keep their relative order.
    pub fn remove_qubits(&self, qubits: &[usize], outcome: usize) -> StateVector {
        let kept: Vec<usize> = (0..self.qubit_count)
            .filter(|q| !qubits.contains(q))
            .collect();
        let mut amplitudes = vec![C64::default(); 1 << kept.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            if gather_bits(i, qubits) == outcome {
                amplitudes[gather_bits(i, &kept)] = *a;
            }
        }
        StateVector {
            amplitudes,
            qubit_count: kept.len(),
        }
    }

    /// Outer product `|ψ⟩⟨ψ|`.
    pub fn outer(&self) -> CMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        &v * v.adjoint()
    }
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(overlap(a, b)?.powi(2))
}

/// `|⟨a|b⟩|`, the quantity some reports quote as "fidelity".
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<f64> {
    check_normalized(a)?;
    check_normalized(b)?;
    Ok(a.inner(b)?.norm())
}

fn check_normalized(s: &StateVector) -> Result<()> {
    if !s.is_normalized() {
        return Err(Error::validation(format!(
            "fidelity needs normalized states (squared norm {})",
            s.norm_sqr()
        )));
    }
    Ok(())
}

/// Packs bits `qubits[k]` of `index` into bit `k` of the result.
pub(crate) fn gather_bits(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &q)| acc | (((index >> q) & 1) << k))
}

/// Inverse of [`gather_bits`]: spreads bit `k` of `value` onto `qubits[k]`.
pub(crate) fn scatter_bits(value: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &q)| acc | (((value >> k) & 1) << q))
}

/// Out-of-place controlled gate application. Each output amplitude is an
/// independent dot product, so parallel and sequential runs agree bit for bit.
pub(crate) fn apply_gate(
    amps: &[C64],
    matrix: &CMatrix,
    targets: &[usize],
    controls: &[usize],
    exec: Exec,
) -> Vec<C64> {
    debug_assert!(is_power_of_two(amps.len()));
    debug_assert_eq!(matrix.nrows(), 1 << targets.len());
    let control_mask = controls.iter().fold(0usize, |m, &q| m | (1 << q));
    let target_mask = targets.iter().fold(0usize, |m, &q| m | (1 << q));
    let offsets: Vec<usize> = (0..matrix.ncols())
        .map(|col| scatter_bits(col, targets))
        .collect();
    exec.map(amps.len(), |i| {
        if i & control_mask != control_mask {
            return amps[i];
        }
        let row = gather_bits(i, targets);
        let base = i & !target_mask;
        offsets
            .iter()
            .enumerate()
            .map(|(col, off)| matrix[(row, col)] * amps[base | off])
            .sum()
    })
}
