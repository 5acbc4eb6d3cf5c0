//! Rewrites circuits into the gate set the key-update calculus can track:
//! Paulis, H, S, S†, T, T†, uncontrolled Rx/Ry/Rz, single-control CNOT and
//! SWAP. Global phases are dropped.

use super::gate::{gates, Gate, GateKind};
use super::Circuit;
use crate::error::{Error, Result};
use crate::quantum::{CMatrix, C64};
use std::f64::consts::PI;

/// Angles closer than this to a multiple of 2π are dropped (the rotation is
/// ±I, a global phase for an uncontrolled gate).
const ANGLE_EPS: f64 = 1e-12;

/// Z-Y-Z Euler form `U = e^{iα} Rz(β) Ry(γ) Rz(δ)`.
#[derive(Debug, Clone, Copy)]
pub struct ZyzAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

pub fn zyz_decompose(u: &CMatrix) -> ZyzAngles {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let alpha = det.arg() / 2.0;
    let v = u * C64::from_polar(1.0, -alpha);
    let gamma = 2.0 * v[(1, 0)].norm().atan2(v[(0, 0)].norm());
    let sum = if v[(1, 1)].norm() > 1e-12 {
        2.0 * v[(1, 1)].arg()
    } else {
        0.0
    };
    let diff = if v[(1, 0)].norm() > 1e-12 {
        2.0 * v[(1, 0)].arg()
    } else {
        0.0
    };
    ZyzAngles {
        alpha,
        beta: (sum + diff) / 2.0,
        gamma,
        delta: (sum - diff) / 2.0,
    }
}

fn is_trivial_angle(theta: f64) -> bool {
    let r = theta.rem_euclid(2.0 * PI);
    r < ANGLE_EPS || 2.0 * PI - r < ANGLE_EPS
}

fn push_rotation(out: &mut Vec<Gate>, kind: GateKind, q: usize, theta: f64) {
    if is_trivial_angle(theta) {
        return;
    }
    let g = match kind {
        GateKind::Rx => gates::rx(q, theta),
        GateKind::Ry => gates::ry(q, theta),
        _ => gates::rz(q, theta),
    };
    out.push(g);
}

/// Circuit-order gates for `e^{iα} Rz(β) Ry(γ) Rz(δ)` on `q`, phase dropped.
fn push_zyz(out: &mut Vec<Gate>, q: usize, a: ZyzAngles) {
    push_rotation(out, GateKind::Rz, q, a.delta);
    push_rotation(out, GateKind::Ry, q, a.gamma);
    push_rotation(out, GateKind::Rz, q, a.beta);
}

/// Controlled-U via `U = e^{iα} A X B X C` with `ABC = I`; the phase becomes
/// `Rz(α)` on the control (equal to `U1(α)` up to global phase).
fn push_controlled(out: &mut Vec<Gate>, control: usize, target: usize, u: &CMatrix) {
    let ZyzAngles {
        alpha,
        beta,
        gamma,
        delta,
    } = zyz_decompose(u);
    // C
    push_rotation(out, GateKind::Rz, target, (delta - beta) / 2.0);
    out.push(gates::cnot(control, target));
    // B = Ry(-γ/2) Rz(-(δ+β)/2)
    push_rotation(out, GateKind::Rz, target, -(delta + beta) / 2.0);
    push_rotation(out, GateKind::Ry, target, -gamma / 2.0);
    out.push(gates::cnot(control, target));
    // A = Rz(β) Ry(γ/2)
    push_rotation(out, GateKind::Ry, target, gamma / 2.0);
    push_rotation(out, GateKind::Rz, target, beta);
    push_rotation(out, GateKind::Rz, control, alpha);
}

/// Returns true if the key tracker accepts `g` as-is.
pub fn is_trackable(g: &Gate) -> bool {
    use GateKind::*;
    match g.kind() {
        X | Y | Z | H | S | Sdg | T | Tdg | Rx | Ry | Rz => g.controls().is_empty(),
        Cnot => g.controls().len() == 1,
        Swap => g.controls().is_empty(),
        U1 | U3 | Matrix => false,
    }
}

/// Decomposes `circuit` so that every gate [`is_trackable`]. The result
/// implements the same unitary up to a global phase.
pub fn compile_for_qhe(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Vec::new();
    let mut unsupported = Vec::new();
    for (i, g) in circuit.gates().iter().enumerate() {
        if is_trackable(g) {
            out.push(g.clone());
            continue;
        }
        let single_target = g.targets().len() == 1 && g.kind() != GateKind::Swap;
        match (single_target, g.controls()) {
            (true, []) => {
                let q = g.targets()[0];
                match g.kind() {
                    GateKind::U1 => push_rotation(&mut out, GateKind::Rz, q, g.params()[0]),
                    _ => push_zyz(&mut out, q, zyz_decompose(&g.base_matrix())),
                }
            }
            (true, [ctrl]) if g.kind() == GateKind::X => out.push(gates::cnot(*ctrl, g.targets()[0])),
            (true, [ctrl]) => push_controlled(&mut out, *ctrl, g.targets()[0], &g.base_matrix()),
            _ => unsupported.push(format!(
                "#{i} {} (targets {:?}, controls {:?})",
                g.kind(),
                g.targets(),
                g.controls()
            )),
        }
    }
    if !unsupported.is_empty() {
        return Err(Error::UnsupportedGate(unsupported.join(", ")));
    }
    Circuit::from_gates(circuit.qubit_count(), out)
}
