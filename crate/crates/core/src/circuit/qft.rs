use super::gate::{gates, Gate};
use std::f64::consts::PI;

/// Quantum Fourier transform on `qubits` (qubits[0] least significant):
/// `|x⟩ → 2^{-m/2} Σ_y e^{2πi·xy/2^m} |y⟩`.
pub fn qft(qubits: &[usize]) -> Vec<Gate> {
    let m = qubits.len();
    let mut out = Vec::new();
    for j in (0..m).rev() {
        out.push(gates::h(qubits[j]));
        for k in (0..j).rev() {
            let angle = 2.0 * PI / f64::from(1u32 << (j - k + 1));
            out.push(
                gates::u1(qubits[j], angle)
                    .controlled_by(&[qubits[k]])
                    .expect("distinct register qubits"),
            );
        }
    }
    for i in 0..m / 2 {
        out.push(gates::swap(qubits[i], qubits[m - 1 - i]));
    }
    out
}

pub fn inverse_qft(qubits: &[usize]) -> Vec<Gate> {
    qft(qubits).iter().rev().map(Gate::inverse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;
    use crate::quantum::{max_abs_diff, CMatrix, C64};

    fn dft(m: usize) -> CMatrix {
        let n = 1 << m;
        CMatrix::from_fn(n, n, |y, x| {
            C64::from_polar(1.0 / (n as f64).sqrt(), 2.0 * PI * (x * y) as f64 / n as f64)
        })
    }

    #[test]
    fn matches_dft_matrix() {
        for m in 1..=4 {
            let qs: Vec<usize> = (0..m).collect();
            let c = Circuit::from_gates(m, qft(&qs)).unwrap();
            assert!(max_abs_diff(&c.unitary(), &dft(m)) < 1e-12, "m = {m}");
            let ci = Circuit::from_gates(m, inverse_qft(&qs)).unwrap();
            assert!(max_abs_diff(&ci.unitary(), &dft(m).adjoint()) < 1e-12);
        }
    }
}
