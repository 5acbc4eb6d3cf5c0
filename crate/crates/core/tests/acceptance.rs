//! One PASS/FAIL line per acceptance criterion, written straight to stderr
//! so it shows even when libtest captures output.
//!
//! Criterion 1 is split three ways. Its last clause (decrypted q0 is 0 with
//! probability 1) does not hold for the plaintext circuit itself, so 1c is
//! reported as FAIL without failing the test run.

use qhedr_core::circuit::simulate_statevector;
use qhedr_core::experiments::random::{random_circuit, random_qubit_unitary, random_state};
use qhedr_core::experiments::{cmd_qpce_demo, cmd_swap_trick, htht_circuit, ExperimentConfig, REFERENCE_ROWS};
use qhedr_core::keys::{build_key_update_program, qotp_encrypt, BellOutcome, KeyPolynomial, PauliKey, Symbol};
use qhedr_core::protocol::{run_protocol, ClientInput, ProtocolConfig};
use qhedr_core::qpce::{
    classical_pca_oracle, run_qpce, Interpretation, PhaseEstimationConfig, ThresholdConfig,
};
use qhedr_core::quantum::{
    derive_seed, fidelity, max_abs_diff, seeded_rng, CMatrix, DensityMatrix, StateVector, C64,
};
use rand::Rng;
use std::io::Write;
use std::time::{Duration, Instant};

fn line(id: &str, passed: bool, detail: String) {
    let status = if passed { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "[acceptance] {id:<3} {status}  {detail}");
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn outcomes(tuple: usize) -> Vec<BellOutcome> {
    let bit = |k: usize| ((tuple >> k) & 1) as u8;
    vec![
        BellOutcome { gadget_index: 1, r_a: bit(1), r_b: bit(0) },
        BellOutcome { gadget_index: 2, r_a: bit(3), r_b: bit(2) },
    ]
}

fn criterion_1() -> (bool, bool, bool) {
    let start = Instant::now();
    let plain = simulate_statevector(&htht_circuit(), &StateVector::zero(1)).unwrap();
    let mut rows = Vec::new();
    let mut worst = (0.0f64, (0u8, 0u8), 0usize);
    let mut min_fid = 1.0f64;
    for key in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
        for tuple in 0..16 {
            let mut cfg = ProtocolConfig::new(htht_circuit(), ClientInput::State(StateVector::zero(1)), 1);
            cfg.key = Some(PauliKey::new(vec![key.0], vec![key.1]).unwrap());
            cfg.forced_outcomes = Some(outcomes(tuple));
            let r = run_protocol(&cfg).unwrap();
            let p1 = r.decrypted_state.marginal_probabilities(&[0])[1];
            if p1 > worst.0 {
                worst = (p1, key, tuple);
            }
            min_fid = min_fid.min(fidelity(&r.decrypted_state, &plain).unwrap());
            if key == (1, 1) {
                rows.push((tuple, r.final_key.a[0], r.final_key.b[0], r.raw_state.marginal_probabilities(&[0])[1]));
            }
        }
    }
    let elapsed = start.elapsed();
    let mut keys_ok = true;
    let mut raw_ok = true;
    for t in REFERENCE_ROWS {
        let tuple = (t.ra2 as usize) << 3 | (t.rb2 as usize) << 2 | (t.ra1 as usize) << 1 | t.rb1 as usize;
        let &(_, a, b, raw_p1) = rows.iter().find(|r| r.0 == tuple).unwrap();
        keys_ok &= (a, b) == (t.a_f, t.b_f);
        raw_ok &= u8::from(raw_p1 > 0.5) == t.raw_q0;
    }
    let a = keys_ok && within(elapsed, 1.0);
    line("1a", a, format!("four listed rows give (a_f, b_f) = (1,0) (0,1) (1,1) (0,1); {:.3}s < 1s", elapsed.as_secs_f64()));
    let b = raw_ok && min_fid > 1.0 - 1e-12;
    line("1b", b, format!("listed raw q0 values are the modal readings; all 64 branches decrypt to the plaintext (min fidelity {min_fid:.12})"));
    let c = worst.0 < 1e-12;
    line("1c", c, format!(
        "decrypted q0 = 0 with probability 1: key {:?}, tuple {:04b} gives P(q0=1) = {:.6}, equal to the plaintext HTHT|0> value {:.6}",
        worst.1, worst.2, worst.0, plain.marginal_probabilities(&[0])[1]
    ));
    (a, b, c)
}

fn criterion_2() -> bool {
    let p = build_key_update_program(&htht_circuit(), 1).unwrap();
    let poly = |s: &[Symbol]| KeyPolynomial::from_terms(0, s.iter().copied());
    use Symbol::*;
    let ok = p.h_list.len() == 2
        && p.h_list[0] == poly(&[A0(0)])
        && p.h_list[1] == poly(&[A0(0), B0(0), Rb(1)])
        && p.final_a()[0] == poly(&[B0(0), Ra(1), Rb(1), Rb(2)])
        && p.final_b()[0] == poly(&[A0(0), B0(0), Rb(1), Ra(2)]);
    line("2", ok, format!(
        "h1 = {}, h2 = {}, a_f = {}, b_f = {}",
        p.h_list[0], p.h_list[1], p.final_a()[0], p.final_b()[0]
    ));
    ok
}

fn criterion_3() -> bool {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 1..=3usize {
        for i in 0..20u64 {
            let mut rng = seeded_rng(derive_seed(300 + n as u64, i));
            let psi = random_state(n, &mut rng);
            let rho = DensityMatrix::from_pure(&psi);
            let d = rho.dim();
            let mut avg = CMatrix::zeros(d, d);
            for k in PauliKey::all(n) {
                avg += qotp_encrypt(&rho, &k).unwrap().entries();
            }
            avg /= C64::new((1usize << (2 * n)) as f64, 0.0);
            worst = worst.max(max_abs_diff(&avg, DensityMatrix::maximally_mixed(n).entries()));
        }
    }
    let elapsed = start.elapsed();
    let ok = worst < 1e-10 && within(elapsed, 10.0);
    line("3", ok, format!("max deviation from I/2^n {worst:.2e} (< 1e-10) over 60 plaintexts; {:.3}s < 10s", elapsed.as_secs_f64()));
    ok
}

fn criterion_4() -> bool {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut gadgets = 0;
    for i in 0..200u64 {
        let mut rng = seeded_rng(derive_seed(400, i));
        let n = rng.random_range(1..=3);
        let c = random_circuit(n, 12, 4, i % 5 == 4, &mut rng);
        let psi = random_state(n, &mut rng);
        let r = run_protocol(&ProtocolConfig::new(c.clone(), ClientInput::State(psi.clone()), derive_seed(401, i))).unwrap();
        let plain = simulate_statevector(&c, &psi).unwrap();
        let td = DensityMatrix::from_pure(&r.decrypted_state)
            .trace_distance(&DensityMatrix::from_pure(&plain))
            .unwrap();
        worst = worst.max(td);
        gadgets = gadgets.max(r.metrics.measurement_count);
    }
    let elapsed = start.elapsed();
    let ok = worst <= 1e-8 && within(elapsed, 60.0);
    line("4", ok, format!("200 circuits, max trace distance {worst:.2e} (<= 1e-8), up to {gadgets} gadgets; {:.3}s < 60s", elapsed.as_secs_f64()));
    ok
}

fn criterion_5() -> bool {
    let start = Instant::now();
    let pe = PhaseEstimationConfig::new(3, 8.0 * std::f64::consts::PI).unwrap();
    let mut worst = 1.0f64;
    for i in 0..200u64 {
        let mut rng = seeded_rng(derive_seed(500, i));
        let k = rng.random_range(0..=4usize);
        let (l0, l1) = (0.25 * k as f64, 1.0 - 0.25 * k as f64);
        let u = random_qubit_unitary(&mut rng);
        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(l0, 0.0), C64::new(l1, 0.0)]));
        let m = &u * diag * u.adjoint();
        let rho = DensityMatrix::unchecked((&m + m.adjoint()) * C64::new(0.5, 0.0)).unwrap();
        let tau = rng.random_range(0.0..l0.max(l1));
        let interpretation = if i % 2 == 0 { Interpretation::Subtractive } else { Interpretation::Ratio };
        let th = ThresholdConfig::new(tau, 1.0, interpretation).unwrap();
        let out = run_qpce(&rho, &th, &pe).unwrap();
        let oracle = classical_pca_oracle(&rho, &th).unwrap();
        worst = worst.min(fidelity(&out.output_state, &oracle).unwrap());
    }
    let elapsed = start.elapsed();
    let ok = worst >= 0.999 && within(elapsed, 30.0);
    line("5", ok, format!("200 matrices (t0 = 8π, 3 bits), min fidelity {worst:.9} (>= 0.999); {:.3}s < 30s", elapsed.as_secs_f64()));
    ok
}

fn criterion_6() -> bool {
    let r = cmd_qpce_demo(&ExperimentConfig::default()).unwrap();
    let fid = &r.results["fidelity"]["estimate"];
    let noiseless = fid["noiseless"].as_f64().unwrap();
    let ip = r.results["targets"]["inner_product_squared"].as_f64().unwrap();
    let ok = noiseless >= 0.99 && (ip - 0.9757).abs() <= 0.001;
    line("6", ok, format!(
        "8192 shots: fidelity vs noiseless {noiseless:.6} (>= 0.99); vs ratio target {:.6}; vs subtractive target {:.6}; hardware reference 0.9870; |<eq7|paper>|^2 = {ip:.6}",
        fid["ratio_target"].as_f64().unwrap(),
        fid["subtractive_target"].as_f64().unwrap()
    ));
    ok
}

fn criterion_7() -> bool {
    let start = Instant::now();
    let r = cmd_swap_trick(&ExperimentConfig::default()).unwrap();
    let elapsed = start.elapsed();
    let ratios = |k: &str| -> Vec<f64> { r.results[k].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect() };
    let (local, global) = (ratios("local_ratios"), ratios("global_ratios"));
    let ok = local.iter().all(|x| (3.2..=4.8).contains(x))
        && global.iter().all(|x| (1.6..=2.4).contains(x))
        && within(elapsed, 10.0);
    line("7", ok, format!("local ratios {local:.3?} in [3.2, 4.8]; global ratios {global:.3?} in [1.6, 2.4]; {:.3}s < 10s", elapsed.as_secs_f64()));
    ok
}

fn criterion_8() -> bool {
    let r = |x: f64| C64::new(x, 0.0);
    let rho = DensityMatrix::unchecked(CMatrix::from_row_slice(2, 2, &[r(1.5), r(0.5), r(0.5), r(1.5)])).unwrap();
    let th = ThresholdConfig::new(0.0, 1.0, Interpretation::Subtractive).unwrap();
    let out = run_qpce(&rho, &th, &PhaseEstimationConfig::default()).unwrap();
    let on_grid: f64 = ["01", "10"].iter().filter_map(|k| out.register_readout.get(*k)).sum();
    let leakage = (1.0 - on_grid).abs();
    let ok = leakage <= 1e-9 && out.warnings.is_empty() && out.register_readout.keys().all(|k| k == "01" || k == "10");
    line("8", ok, format!("register readout {:?}; leakage {leakage:.2e} (<= 1e-9)", out.register_readout));
    ok
}

#[test]
fn acceptance_criteria() {
    let (a1, b1, _c1) = criterion_1();
    let results = [
        ("1a", a1),
        ("1b", b1),
        ("2", criterion_2()),
        ("3", criterion_3()),
        ("4", criterion_4()),
        ("5", criterion_5()),
        ("6", criterion_6()),
        ("7", criterion_7()),
        ("8", criterion_8()),
    ];
    let failed: Vec<_> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
