use super::dataset::encode_density;
use super::phase::{build_phase_estimation, PhaseEstimationConfig, QpceLayout, QuantizationWarning};
use super::threshold::{build_threshold_rotation, rotation_amplitudes, ThresholdConfig};
use crate::circuit::{postselect, simulate_statevector};
use crate::error::{Error, Result};
use crate::quantum::{
    bitstring, eigendecompose, CMatrix, DensityMatrix, StateVector, C64,
};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize)]
pub struct QpceResult {
    /// Data register after projecting the phase register onto zero.
    pub output_state: StateVector,
    /// Probability that the ancilla is found in `|1⟩`.
    pub postselect_probability: f64,
    /// Register distribution in the post-selected branch, before uncomputing.
    pub register_readout: BTreeMap<String, f64>,
    /// Weight left outside register value zero after uncomputing.
    pub register_residual: f64,
    pub warnings: Vec<QuantizationWarning>,
    #[serde(skip)]
    pub reduced_density: DensityMatrix,
    #[serde(skip)]
    pub layout: QpceLayout,
}

impl QpceResult {
    /// The output amplitudes reshaped into a `d×d` matrix (row-major).
    pub fn output_matrix(&self) -> CMatrix {
        vec_to_matrix(self.output_state.amplitudes())
    }
}

fn vec_to_matrix(v: &[C64]) -> CMatrix {
    let d = (v.len() as f64).sqrt().round() as usize;
    CMatrix::from_row_slice(d, d, v)
}

/// Runs encoding, phase estimation, threshold rotation, post-selection and
/// uncomputation on the state vector of all `2n + t + 1` qubits.
pub fn run_qpce(
    rho: &DensityMatrix,
    threshold: &ThresholdConfig,
    pe: &PhaseEstimationConfig,
) -> Result<QpceResult> {
    rho.validate_operator().map_err(|e| e.at_stage("input"))?;
    let layout = QpceLayout::new(2 * rho.qubit_count(), pe.precision_bits);
    let encoded = encode_density(rho).map_err(|e| e.at_stage("encoding"))?;
    let estimation = build_phase_estimation(rho, pe).map_err(|e| e.at_stage("phase-estimation"))?;
    let rotation =
        build_threshold_rotation(threshold, pe, &layout).map_err(|e| e.at_stage("rotation"))?;

    let input = StateVector::zero(pe.precision_bits + 1).tensor(&encoded);
    let estimated = simulate_statevector(&estimation.circuit, &input)
        .map_err(|e| e.at_stage("phase-estimation"))?;
    let rotated =
        simulate_statevector(&rotation, &estimated).map_err(|e| e.at_stage("rotation"))?;
    let (selected, postselect_probability) = postselect(&rotated, layout.ancilla(), 1)?;

    let register = layout.register();
    let register_readout = selected
        .marginal_probabilities(&register)
        .into_iter()
        .enumerate()
        .filter(|(_, p)| *p > 1e-15)
        .map(|(m, p)| (bitstring(m, register.len()), p))
        .collect();

    let uncomputed = simulate_statevector(&estimation.circuit.inverse(), &selected)
        .map_err(|e| e.at_stage("uncompute"))?;
    let mut discard = register.clone();
    discard.push(layout.ancilla());
    let reduced_density = DensityMatrix::from_pure(&uncomputed)
        .partial_trace(&discard)
        .map_err(|e| e.at_stage("uncompute"))?;
    let (projected, kept) = uncomputed.project(&register, 0);
    if kept < 1e-12 {
        return Err(Error::Invariant(
            "no weight left on register value zero after uncomputing".into(),
        ));
    }
    let output_state = projected
        .remove_qubits(&discard, 1 << register.len())
        .normalized()?;
    Ok(QpceResult {
        output_state,
        postselect_probability,
        register_readout,
        register_residual: (1.0 - kept).max(0.0),
        warnings: estimation.warnings,
        reduced_density,
        layout,
    })
}

/// Classical reference: `Σ w(λ_k) v_k ⊗ conj(v_k)`, normalized, with the
/// weights of the chosen interpretation.
pub fn classical_pca_oracle(rho: &DensityMatrix, threshold: &ThresholdConfig) -> Result<StateVector> {
    threshold.validate()?;
    let eig = eigendecompose(rho)?;
    let d = rho.dim();
    let mut amps = vec![C64::default(); d * d];
    for (l, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        let w = threshold.interpretation.output_weight(*l, threshold.tau);
        if w == 0.0 {
            continue;
        }
        for i in 0..d {
            for j in 0..d {
                amps[i * d + j] += v[i] * v[j].conj() * w;
            }
        }
    }
    if amps.iter().all(|a| a.norm() < 1e-15) {
        return Err(Error::PostSelectionImpossible { probability: 0.0 });
    }
    StateVector::subnormalized(amps)?.normalized()
}

/// Ancilla success probability predicted from the spectrum, assuming each
/// eigenvalue lands on its nearest register value.
pub fn expected_postselect_probability(
    rho: &DensityMatrix,
    threshold: &ThresholdConfig,
    pe: &PhaseEstimationConfig,
) -> Result<f64> {
    let amps = rotation_amplitudes(threshold, pe)?;
    let eig = eigendecompose(rho)?;
    let total: f64 = eig.eigenvalues.iter().map(|l| l * l).sum();
    let hit: f64 = eig
        .eigenvalues
        .iter()
        .map(|&l| {
            let m = (pe.reading_of(l).round() as usize) % pe.slices();
            l * l * amps[m] * amps[m]
        })
        .sum();
    Ok(hit / total)
}
