use super::report::{Check, ExperimentConfig, Report, Table};
use crate::error::Result;
use crate::qpce::{exact_evolution, first_order, read_density_csv, swap_trick_evolve, swap_trick_step};
use crate::quantum::{DensityMatrix, StateVector};
use serde_json::json;

const DTS: [f64; 6] = [0.0, 0.1, 0.05, 0.025, 0.0125, 0.00625];
const STEPS: [usize; 5] = [8, 16, 32, 64, 128];
const TOTAL_TIME: f64 = 1.0;

/// Convergence of the swap-trick step against its first-order expansion,
/// and of repeated steps against the direct exponential.
pub fn cmd_swap_trick(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let mut report = Report::new("swap-trick", cfg);
    let h = 0.5f64.sqrt();
    let rho = match &cfg.rho {
        Some(p) => read_density_csv(p)?,
        None => DensityMatrix::from_pure(&StateVector::from_real(&[h, h])?),
    };
    let sigma = DensityMatrix::from_pure(&StateVector::zero(rho.qubit_count()));

    let mut local = Table::new(&["dt", "excess_error", "ratio"]);
    let mut errors = Vec::new();
    for dt in DTS {
        let out = swap_trick_step(&rho, &sigma, dt)?;
        errors.push((out.entries() - first_order(&rho, &sigma, dt)).norm());
    }
    let mut local_ratios = Vec::new();
    for (k, (&dt, &e)) in DTS.iter().zip(&errors).enumerate() {
        let ratio = (k >= 2).then(|| errors[k - 1] / e);
        local_ratios.extend(ratio);
        local.push(vec![dt.to_string(), format!("{e:.6e}"), ratio.map_or(String::new(), |r| format!("{r:.4}"))]);
    }

    let exact = exact_evolution(&rho, &sigma, TOTAL_TIME)?;
    let mut global = Table::new(&["steps", "error", "ratio"]);
    let mut global_errors = Vec::new();
    for n in STEPS {
        let e = (swap_trick_evolve(&rho, &sigma, TOTAL_TIME, n)?.entries() - exact.entries()).norm();
        global_errors.push(e);
    }
    let mut global_ratios = Vec::new();
    for (k, (&n, &e)) in STEPS.iter().zip(&global_errors).enumerate() {
        let ratio = (k >= 1).then(|| global_errors[k - 1] / e);
        global_ratios.extend(ratio);
        global.push(vec![n.to_string(), format!("{e:.6e}"), ratio.map_or(String::new(), |r| format!("{r:.4}"))]);
    }

    report.checks.push(Check::new("zero_step_exact", errors[0] < 1e-14, format!("dt = 0 error {:.3e}", errors[0])));
    report.checks.push(Check::new(
        "local_second_order",
        local_ratios.iter().all(|r| (3.2..=4.8).contains(r)),
        format!("ratios per dt halving {local_ratios:.4?}"),
    ));
    report.checks.push(Check::new(
        "global_first_order",
        global_ratios.iter().all(|r| (1.6..=2.4).contains(r)),
        format!("ratios per step doubling {global_ratios:.4?}"),
    ));
    report.tables.insert("local".into(), local);
    report.tables.insert("global".into(), global);
    report.results = json!({
        "total_time": TOTAL_TIME,
        "local": DTS.iter().zip(&errors).map(|(dt, e)| json!({"dt": dt, "excess_error": e})).collect::<Vec<_>>(),
        "local_ratios": local_ratios,
        "global": STEPS.iter().zip(&global_errors).map(|(n, e)| json!({"steps": n, "error": e})).collect::<Vec<_>>(),
        "global_ratios": global_ratios,
    });
    Ok(report)
}
