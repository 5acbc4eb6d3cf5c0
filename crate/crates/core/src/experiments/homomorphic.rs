use super::random::{random_circuit, random_state};
use super::report::{Check, ExperimentConfig, Report, Table};
use crate::circuit::{compile_for_qhe, simulate_statevector, Circuit};
use crate::error::Result;
use crate::exec::Exec;
use crate::protocol::{run_protocol, ClientInput, ProtocolConfig};
use crate::quantum::{derive_seed, seeded_rng, DensityMatrix, StateVector};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

const MAX_QUBITS: usize = 3;
const MAX_GATES: usize = 12;
const MAX_T: usize = 4;
const TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
struct Trial {
    index: usize,
    qubits: usize,
    gates: usize,
    clifford_only: bool,
    gadgets: usize,
    trace_distance: f64,
    xor_count: usize,
    bound: f64,
    empirical_bound: f64,
    within_empirical_bound: bool,
    #[serde(skip)]
    circuit: Circuit,
}

fn evaluate(circuit: &Circuit, input: &StateVector, seed: u64) -> Result<(f64, crate::protocol::ProtocolReport)> {
    let cfg = ProtocolConfig::new(circuit.clone(), ClientInput::State(input.clone()), seed);
    let report = run_protocol(&cfg)?;
    let plain = simulate_statevector(circuit, input)?;
    let td = DensityMatrix::from_pure(&report.decrypted_state)
        .trace_distance(&DensityMatrix::from_pure(&plain))?;
    Ok((td, report))
}

/// Random circuits through the whole protocol, compared against the
/// plaintext evolution. Every fifth trial is Clifford-only. With
/// `--circuit`, that circuit (compiled for key tracking) is run as well.
pub fn cmd_random_homomorphic(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let mut report = Report::new("random-homomorphic", cfg);
    let trials = Exec::default().try_map(cfg.trials, |i| -> Result<Trial> {
        let seed = derive_seed(cfg.seed, i as u64);
        let mut rng = seeded_rng(seed);
        let n = rng.random_range(1..=MAX_QUBITS);
        let clifford_only = i % 5 == 4;
        let circuit = random_circuit(n, MAX_GATES, MAX_T, clifford_only, &mut rng);
        let input = random_state(n, &mut rng);
        let (td, r) = evaluate(&circuit, &input, derive_seed(seed, 1))?;
        Ok(Trial {
            index: i,
            qubits: n,
            gates: circuit.len(),
            clifford_only,
            gadgets: r.metrics.measurement_count,
            trace_distance: td,
            xor_count: r.metrics.xor_count,
            bound: r.metrics.bound,
            empirical_bound: r.metrics.empirical_bound,
            within_empirical_bound: r.metrics.within_empirical_bound,
            circuit,
        })
    })?;

    let worst = trials
        .iter()
        .max_by(|a, b| a.trace_distance.total_cmp(&b.trace_distance))
        .expect("at least one trial");
    let detail = if worst.trace_distance <= TOLERANCE {
        format!("max trace distance {:.3e} over {} circuits", worst.trace_distance, trials.len())
    } else {
        format!(
            "trial {} has trace distance {:.3e}; circuit {}",
            worst.index,
            worst.trace_distance,
            worst.circuit.to_json()?
        )
    };
    report.checks.push(Check::new("homomorphic_correctness", worst.trace_distance <= TOLERANCE, detail));
    let clifford = trials.iter().filter(|t| t.clifford_only).count();
    report.checks.push(Check::new(
        "clifford_subset_exercised",
        clifford > 0 && trials.iter().filter(|t| t.clifford_only).all(|t| t.gadgets == 0),
        format!("{clifford} Clifford-only circuits, all with zero gadgets"),
    ));
    let over: Vec<usize> = trials.iter().filter(|t| !t.within_empirical_bound).map(|t| t.index).collect();
    report.checks.push(Check::new(
        "xor_count_within_empirical_bound",
        over.is_empty(),
        if over.is_empty() {
            "every XOR count ≤ 2(M+n)log2(M+n+2)".to_string()
        } else {
            format!("trials over the bound: {over:?}")
        },
    ));

    let mut table = Table::new(&["trial", "qubits", "gates", "clifford_only", "gadgets", "trace_distance", "xor_count", "bound", "empirical_bound"]);
    for t in &trials {
        table.push(vec![
            t.index.to_string(), t.qubits.to_string(), t.gates.to_string(), t.clifford_only.to_string(),
            t.gadgets.to_string(), format!("{:.3e}", t.trace_distance), t.xor_count.to_string(),
            format!("{:.3}", t.bound), format!("{:.3}", t.empirical_bound),
        ]);
    }
    report.tables.insert("trials".into(), table);

    let mut custom = serde_json::Value::Null;
    if let Some(path) = &cfg.circuit {
        let circuit = compile_for_qhe(&Circuit::read(path)?)?;
        let mut rng = seeded_rng(derive_seed(cfg.seed, u64::MAX));
        let input = random_state(circuit.qubit_count(), &mut rng);
        let (td, r) = evaluate(&circuit, &input, derive_seed(cfg.seed, u64::MAX - 1))?;
        report.checks.push(Check::new(
            "custom_circuit",
            td <= TOLERANCE,
            format!("trace distance {td:.3e} with {} gadgets", r.metrics.measurement_count),
        ));
        custom = json!({ "trace_distance": td, "metrics": r.metrics, "peak_live_qubits": r.peak_live_qubits });
    }

    report.results = json!({
        "trials": trials.len(),
        "max_trace_distance": worst.trace_distance,
        "tolerance": TOLERANCE,
        "max_gadgets": trials.iter().map(|t| t.gadgets).max(),
        "max_xor_count": trials.iter().map(|t| t.xor_count).max(),
        "custom_circuit": custom,
        "per_trial": trials,
    });
    Ok(report)
}
