//! Seeded random states, density matrices and circuits for the test suites.

use crate::circuit::{gates, Circuit, Gate};
use crate::quantum::{CMatrix, DensityMatrix, SimRng, StateVector, C64};
use rand::seq::IndexedRandom;
use rand::Rng;
use std::f64::consts::PI;

pub fn random_state(n: usize, rng: &mut SimRng) -> StateVector {
    loop {
        let amps: Vec<C64> = (0..1usize << n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        if let Ok(s) = StateVector::subnormalized(amps).and_then(StateVector::normalized) {
            return s;
        }
    }
}

/// `G G† / tr(G G†)` for a random complex `G`: full rank almost surely.
pub fn random_density(n: usize, rng: &mut SimRng) -> DensityMatrix {
    let d = 1usize << n;
    let g = CMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr).expect("G G† is a valid state after normalization")
}

/// Haar-ish random 2×2 unitary from a random state and its orthogonal.
pub fn random_qubit_unitary(rng: &mut SimRng) -> CMatrix {
    let v = random_state(1, rng);
    let (a, b) = (v.amplitudes()[0], v.amplitudes()[1]);
    CMatrix::from_row_slice(2, 2, &[a, -b.conj(), b, a.conj()])
}

/// Gate families drawn by [`random_circuit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    X,
    Z,
    H,
    S,
    Cnot,
    Swap,
    T,
    Tdg,
    Ry,
}

/// Circuit over `{X, Z, H, S, CNOT, SWAP}` plus, unless `clifford_only`,
/// `{T, T†, Ry}` with at most `max_t` T-type gates and at most two Ry.
pub fn random_circuit(
    n: usize,
    max_gates: usize,
    max_t: usize,
    clifford_only: bool,
    rng: &mut SimRng,
) -> Circuit {
    use Family::*;
    let mut families = vec![X, Z, H, S];
    if n > 1 {
        families.extend([Cnot, Swap]);
    }
    if !clifford_only {
        families.extend([T, Tdg, Ry]);
    }
    let len = rng.random_range(1..=max_gates);
    let (mut t_count, mut ry_count) = (0, 0);
    let mut c = Circuit::new(n);
    while c.len() < len {
        let f = *families.choose(rng).expect("nonempty");
        let q = rng.random_range(0..n);
        let g: Gate = match f {
            X => gates::x(q),
            Z => gates::z(q),
            H => gates::h(q),
            S => gates::s(q),
            Cnot | Swap => {
                let t = (q + 1 + rng.random_range(0..n - 1)) % n;
                if f == Cnot {
                    gates::cnot(q, t)
                } else {
                    gates::swap(q, t)
                }
            }
            T | Tdg if t_count < max_t => {
                t_count += 1;
                if f == T {
                    gates::t(q)
                } else {
                    gates::tdg(q)
                }
            }
            Ry if ry_count < 2 => {
                ry_count += 1;
                gates::ry(q, rng.random_range(-PI..PI))
            }
            _ => continue,
        };
        c.push(g).expect("qubits in range");
    }
    c
}
