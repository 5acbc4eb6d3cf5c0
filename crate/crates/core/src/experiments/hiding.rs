use super::random::random_density;
use super::report::{Check, ExperimentConfig, Report, Table};
use crate::error::Result;
use crate::exec::Exec;
use crate::keys::{qotp_encrypt, PauliKey};
use crate::quantum::{derive_seed, seeded_rng, CMatrix, DensityMatrix, StateVector};
use serde_json::json;

const PLAINTEXTS_PER_SIZE: usize = 20;
const TOLERANCE: f64 = 1e-10;

/// Largest elementwise gap between the key-averaged ciphertext and `I/2^n`.
pub fn key_average_deviation(rho: &DensityMatrix) -> Result<f64> {
    let n = rho.qubit_count();
    let d = rho.dim();
    let mut avg = CMatrix::zeros(d, d);
    for k in PauliKey::all(n) {
        avg += qotp_encrypt(rho, &k)?.entries();
    }
    avg /= crate::quantum::real((1usize << (2 * n)) as f64);
    let mixed = DensityMatrix::maximally_mixed(n);
    Ok(crate::quantum::max_abs_diff(&avg, mixed.entries()))
}

/// Averages the pad over all `4^n` keys for fixed and random plaintexts.
pub fn cmd_qotp_hiding(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let mut report = Report::new("qotp-hiding", cfg);
    let h = 0.5f64.sqrt();
    let mut cases: Vec<(String, DensityMatrix)> = vec![
        ("n1-zero".into(), DensityMatrix::from_pure(&StateVector::zero(1))),
        ("n1-plus".into(), DensityMatrix::from_pure(&StateVector::from_real(&[h, h])?)),
    ];
    for n in 1..=3usize {
        let batch = Exec::default().map(PLAINTEXTS_PER_SIZE, |i| {
            let mut rng = seeded_rng(derive_seed(cfg.seed, (n * 1000 + i) as u64));
            random_density(n, &mut rng)
        });
        cases.extend(batch.into_iter().enumerate().map(|(i, r)| (format!("n{n}-random{i}"), r)));
    }
    let devs = Exec::default().try_map(cases.len(), |i| key_average_deviation(&cases[i].1))?;
    let mut table = Table::new(&["case", "qubits", "max_deviation"]);
    for ((name, rho), dev) in cases.iter().zip(&devs) {
        table.push(vec![name.clone(), rho.qubit_count().to_string(), format!("{dev:.3e}")]);
    }
    let worst = devs.iter().cloned().fold(0.0, f64::max);
    report.checks.push(Check::new(
        "maximally_mixed",
        worst < TOLERANCE,
        format!("max deviation {worst:.3e} over {} plaintexts", cases.len()),
    ));
    report.tables.insert("deviations".into(), table);
    report.results = json!({ "cases": cases.len(), "max_deviation": worst, "tolerance": TOLERANCE });
    Ok(report)
}
