use super::report::{fmt, Check, ExperimentConfig, Report, Table};
use crate::circuit::{compile_for_qhe, simulate_statevector};
use crate::error::Result;
use crate::protocol::{run_protocol, ClientInput, ProtocolConfig};
use crate::qpce::{
    build_demo_circuit, classical_pca_oracle, read_density_csv, run_qpce, DemoCircuit,
    Interpretation, PhaseEstimationConfig, ThresholdConfig, HARDWARE_FIDELITY,
    RATIO_TARGET, HARDWARE_FREQUENCIES, HARDWARE_OUTPUT,
};
use crate::quantum::{derive_seed, fidelity, overlap, real, sample_measurement, CMatrix, DensityMatrix, StateVector, C64};
use serde_json::json;
use std::f64::consts::PI;

const MIN_SURVIVORS: u64 = 10;

fn unit(v: &[f64]) -> Result<StateVector> {
    StateVector::subnormalized(v.iter().map(|&x| real(x)).collect())?.normalized()
}

fn worked_example() -> DensityMatrix {
    DensityMatrix::unchecked(CMatrix::from_row_slice(
        2,
        2,
        &[real(1.5), real(0.5), real(0.5), real(1.5)],
    ))
    .expect("2×2")
}

fn key_index(key: &str) -> usize {
    usize::from_str_radix(key, 2).expect("binary key")
}

fn amplitudes_row(label: &str, v: &[f64]) -> Vec<String> {
    std::iter::once(label.to_string()).chain(v.iter().map(|&x| fmt(x))).collect()
}

/// Post-selected data amplitudes (ancilla 1, register 00) of a 5-qubit state.
fn postselected(state: &StateVector) -> Result<(StateVector, f64)> {
    let amps: Vec<C64> = DemoCircuit::postselected_keys()
        .iter()
        .map(|k| state.amplitudes()[key_index(k)])
        .collect();
    let p = amps.iter().map(|a| a.norm_sqr()).sum();
    Ok((StateVector::subnormalized(amps)?.normalized()?, p))
}

/// Worked QPCE example: noiseless simulation of the five-qubit circuit,
/// shot sampling, square-root-of-frequency reduction and comparison with
/// every reference vector; optionally a user ρ through the generic pipeline.
pub fn cmd_qpce_demo(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let mut report = Report::new("qpce-demo", cfg);
    let threshold = ThresholdConfig::new(cfg.tau, cfg.eta, cfg.interpretation)?;
    let pe = PhaseEstimationConfig::new(cfg.precision_bits, 2.0 * PI)?;

    let rho = match &cfg.rho {
        Some(path) => read_density_csv(path)?,
        None => worked_example(),
    };
    let algo = run_qpce(&rho, &threshold, &pe)?;
    let oracle = classical_pca_oracle(&rho, &threshold)?;
    let algo_fid = fidelity(&algo.output_state, &oracle)?;
    report.warnings.extend(algo.warnings.iter().map(|w| {
        format!(
            "eigenvalue {:.6} reads {:.4} on the register (phase error {:.4})",
            w.eigenvalue, w.reading, w.phase_error
        )
    }));
    report.checks.push(Check::new(
        "algorithm_matches_oracle",
        algo_fid >= 0.999,
        format!("fidelity {algo_fid:.12}"),
    ));
    let algorithm = json!({
        "interpretation": threshold.interpretation,
        "output_state": algo.output_state.amplitudes().iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
        "oracle_state": oracle.amplitudes().iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
        "fidelity_vs_oracle": algo_fid,
        "postselect_probability": algo.postselect_probability,
        "register_readout": algo.register_readout,
        "register_residual": algo.register_residual,
    });
    if cfg.rho.is_some() {
        report.results = json!({ "algorithm": algorithm });
        return Ok(report);
    }

    let fig = build_demo_circuit();
    let full = fig.full()?;
    let state = simulate_statevector(&full, &StateVector::zero(DemoCircuit::QUBITS))?;
    let (noiseless, p_post) = postselected(&state)?;
    let all: Vec<usize> = (0..DemoCircuit::QUBITS).collect();
    let hist = sample_measurement(&state, &all, cfg.shots, derive_seed(cfg.seed, 0))?;

    let keys = DemoCircuit::postselected_keys();
    let counts: Vec<u64> = keys.iter().map(|k| hist.counts.get(k).copied().unwrap_or(0)).collect();
    let survivors: u64 = counts.iter().sum();
    if survivors < MIN_SURVIVORS {
        report.warnings.push(format!(
            "only {survivors} of {} shots survive post-selection",
            cfg.shots
        ));
    }
    let raw: Vec<f64> = counts.iter().map(|&c| (c as f64 / cfg.shots as f64).sqrt()).collect();
    let estimate = unit(&raw).ok();

    let subtractive = classical_pca_oracle(&worked_example(), &ThresholdConfig::new(cfg.tau, 1.0, Interpretation::Subtractive)?)?;
    let ratio_target = unit(&RATIO_TARGET)?;
    let measured = unit(&HARDWARE_OUTPUT)?;
    let targets_ip2 = fidelity(&subtractive, &ratio_target)?;

    let against = |s: &StateVector| -> Result<serde_json::Value> {
        Ok(json!({
            "noiseless": fidelity(s, &noiseless)?,
            "ratio_target": fidelity(s, &ratio_target)?,
            "subtractive_target": fidelity(s, &subtractive)?,
            "hardware_output": fidelity(s, &measured)?,
        }))
    };
    let sampled_fid = match &estimate {
        Some(e) => fidelity(e, &noiseless)?,
        None => f64::NAN,
    };

    let hardware_reduced: Vec<f64> = HARDWARE_FREQUENCIES.iter().map(|f| f.sqrt()).collect();
    let hardware_overlap = overlap(&measured, &ratio_target)?;

    let mut sigma_ok = true;
    let shots = cfg.shots as f64;
    for (k, &c) in keys.iter().zip(&counts) {
        let p = state.amplitudes()[key_index(k)].norm_sqr();
        let bound = 3.0 * (p * (1.0 - p) / shots).sqrt() + 1e-12;
        sigma_ok &= (c as f64 / shots - p).abs() <= bound;
    }

    let compiled = compile_for_qhe(&full)?;
    let pcfg = ProtocolConfig::new(
        compiled.clone(),
        ClientInput::State(StateVector::zero(DemoCircuit::QUBITS)),
        derive_seed(cfg.seed, 1),
    );
    let encrypted = run_protocol(&pcfg)?;
    let (enc_post, enc_p) = postselected(&encrypted.decrypted_state)?;
    let enc_fid = fidelity(&enc_post, &noiseless)?;

    report.checks.push(Check::new(
        "sampled_vs_noiseless",
        sampled_fid >= 0.99,
        format!("fidelity {sampled_fid:.6} from {survivors} surviving shots"),
    ));
    report.checks.push(Check::new(
        "targets_inner_product",
        (targets_ip2 - 0.9757).abs() <= 0.001,
        format!("|<eq7|paper>|^2 = {targets_ip2:.6}"),
    ));
    report.checks.push(Check::new(
        "multinomial_3sigma",
        sigma_ok,
        "post-selected frequencies within 3σ of the exact probabilities",
    ));
    report.checks.push(Check::new(
        "encrypted_matches_plaintext",
        enc_fid >= 1.0 - 1e-8 && (enc_p - p_post).abs() < 1e-8,
        format!("fidelity {enc_fid:.12} with {} gadgets", encrypted.outcomes.len()),
    ));

    report.results = json!({
        "algorithm": algorithm,
        "postselection_keys": keys,
        "postselection_probability": p_post,
        "surviving_shots": survivors,
        "raw_sqrt_frequencies": raw,
        "estimate": estimate.as_ref().map(|e| e.amplitudes().iter().map(|a| a.re).collect::<Vec<_>>()),
        "noiseless": noiseless.amplitudes().iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
        "fidelity": {
            "estimate": match &estimate { Some(e) => against(e)?, None => serde_json::Value::Null },
            "noiseless": against(&noiseless)?,
        },
        "targets": {
            "paper": RATIO_TARGET,
            "eq7": subtractive.amplitudes().iter().map(|a| a.re).collect::<Vec<_>>(),
            "inner_product_squared": targets_ip2,
        },
        "hardware_reference": {
            "reported_frequencies": HARDWARE_FREQUENCIES,
            "sqrt_reduction": hardware_reduced,
            "reported_output": HARDWARE_OUTPUT,
            "reported_hardware_fidelity": HARDWARE_FIDELITY,
            "recomputed_overlap": hardware_overlap,
            "recomputed_overlap_squared": hardware_overlap * hardware_overlap,
        },
        "encrypted_run": {
            "gadgets": encrypted.outcomes.len(),
            "compiled_gates": compiled.len(),
            "peak_live_qubits": encrypted.peak_live_qubits,
            "fidelity_vs_plaintext": enc_fid,
            "postselection_probability": enc_p,
            "metrics": encrypted.metrics,
        },
    });

    let mut histogram = Table::new(&["bitstring", "count"]);
    for (k, c) in &hist.counts {
        histogram.push(vec![k.clone(), c.to_string()]);
    }
    report.tables.insert("histogram".into(), histogram);
    let mut amps = Table::new(&["vector", "a00", "a01", "a10", "a11"]);
    amps.push(amplitudes_row("raw_sqrt_frequency", &raw));
    if let Some(e) = &estimate {
        let v: Vec<f64> = e.amplitudes().iter().map(|a| a.re).collect();
        amps.push(amplitudes_row("estimate", &v));
    }
    let nl: Vec<f64> = noiseless.amplitudes().iter().map(|a| a.norm()).collect();
    amps.push(amplitudes_row("noiseless", &nl));
    amps.push(amplitudes_row("ratio_target", &RATIO_TARGET));
    let e7: Vec<f64> = subtractive.amplitudes().iter().map(|a| a.re).collect();
    amps.push(amplitudes_row("subtractive_target", &e7));
    amps.push(amplitudes_row("hardware_output", &HARDWARE_OUTPUT));
    amps.push(amplitudes_row("hardware_sqrt_reduction", &hardware_reduced));
    report.tables.insert("amplitudes".into(), amps);
    Ok(report)
}
