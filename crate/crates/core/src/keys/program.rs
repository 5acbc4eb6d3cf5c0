use super::pauli::PauliKey;
use super::poly::{Bindings, KeyPolynomial, Symbol};
use crate::circuit::{gates, Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Non-Clifford gate realized through a Bell-pair gadget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GadgetKind {
    T,
    TDagger,
    /// `e^{-iθP/2}`; a U1 is tracked as its Rz equivalent.
    Rotation { axis: Axis, angle: f64 },
}

impl GadgetKind {
    /// Gate the server applies to the data qubit before swapping it out.
    pub fn server_gate(self, qubit: usize) -> Gate {
        match self {
            GadgetKind::T => gates::t(qubit),
            GadgetKind::TDagger => gates::tdg(qubit),
            GadgetKind::Rotation { axis, angle } => rotation(axis, qubit, angle),
        }
    }

    /// Client-side basis rotation on the server half when the basis bit is 1.
    /// T leaves `S^a` behind and T† leaves `S†^a`; a rotation whose sign was
    /// flipped by the pad needs `R(-2θ)` before teleporting.
    pub fn basis_gate(self, qubit: usize, h: u8) -> Option<Gate> {
        if h == 0 {
            return None;
        }
        Some(match self {
            GadgetKind::T => gates::s(qubit),
            GadgetKind::TDagger => gates::sdg(qubit),
            GadgetKind::Rotation { axis, angle } => rotation(axis, qubit, -2.0 * angle),
        })
    }

    /// Symbolic basis bit from the current key of the data qubit.
    pub fn basis_bit(self, a: &KeyPolynomial, b: &KeyPolynomial) -> KeyPolynomial {
        match self {
            GadgetKind::T | GadgetKind::TDagger => a.clone(),
            GadgetKind::Rotation { axis, .. } => match axis {
                Axis::X => b.clone(),
                Axis::Y => a.xor(b),
                Axis::Z => a.clone(),
            },
        }
    }

    /// Key after the gadget with outcomes of gadget `index`.
    pub fn update(self, a: &KeyPolynomial, b: &KeyPolynomial, index: usize) -> (KeyPolynomial, KeyPolynomial) {
        let a2 = a.xor_symbol(Symbol::Ra(index));
        let b2 = match self {
            GadgetKind::T | GadgetKind::TDagger => a.xor(b).xor_symbol(Symbol::Rb(index)),
            GadgetKind::Rotation { .. } => b.xor_symbol(Symbol::Rb(index)),
        };
        (a2, b2)
    }
}

fn rotation(axis: Axis, q: usize, angle: f64) -> Gate {
    match axis {
        Axis::X => gates::rx(q, angle),
        Axis::Y => gates::ry(q, angle),
        Axis::Z => gates::rz(q, angle),
    }
}

/// How the key tracker treats a gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateClass {
    Clifford,
    Gadget(GadgetKind),
}

pub fn classify(g: &Gate) -> Result<GateClass> {
    let controls = g.controls().len();
    let unsupported = || Error::UnsupportedGate(describe(g));
    match g.kind() {
        GateKind::Cnot if controls == 1 => Ok(GateClass::Clifford),
        _ if controls > 0 => Err(unsupported()),
        GateKind::X
        | GateKind::Y
        | GateKind::Z
        | GateKind::H
        | GateKind::S
        | GateKind::Sdg
        | GateKind::Swap => Ok(GateClass::Clifford),
        GateKind::T => Ok(GateClass::Gadget(GadgetKind::T)),
        GateKind::Tdg => Ok(GateClass::Gadget(GadgetKind::TDagger)),
        GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::U1 => {
            let axis = match g.kind() {
                GateKind::Rx => Axis::X,
                GateKind::Ry => Axis::Y,
                _ => Axis::Z,
            };
            Ok(GateClass::Gadget(GadgetKind::Rotation {
                axis,
                angle: g.params()[0],
            }))
        }
        _ => Err(unsupported()),
    }
}

fn describe(g: &Gate) -> String {
    format!("{} on {:?} controlled by {:?}", g.kind(), g.targets(), g.controls())
}

/// Per-qubit symbolic pad `X^{a[q]} Z^{b[q]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicKey {
    pub a: Vec<KeyPolynomial>,
    pub b: Vec<KeyPolynomial>,
}

impl SymbolicKey {
    pub fn initial(n: usize) -> Self {
        Self {
            a: (0..n).map(|q| KeyPolynomial::symbol(Symbol::A0(q))).collect(),
            b: (0..n).map(|q| KeyPolynomial::symbol(Symbol::B0(q))).collect(),
        }
    }
}

/// Conjugates the symbolic pad through a Clifford gate.
pub fn clifford_key_update(g: &Gate, key: &mut SymbolicKey) -> Result<()> {
    if classify(g)? != GateClass::Clifford {
        return Err(Error::UnsupportedGate(describe(g)));
    }
    let t = g.targets()[0];
    match g.kind() {
        GateKind::X | GateKind::Y | GateKind::Z => {}
        GateKind::H => std::mem::swap(&mut key.a[t], &mut key.b[t]),
        GateKind::S | GateKind::Sdg => key.b[t] = key.a[t].xor(&key.b[t]),
        GateKind::Cnot => {
            let c = g.controls()[0];
            key.b[c] = key.b[c].xor(&key.b[t]);
            key.a[t] = key.a[t].xor(&key.a[c]);
        }
        GateKind::Swap => {
            let u = g.targets()[1];
            key.a.swap(t, u);
            key.b.swap(t, u);
        }
        _ => return Err(Error::UnsupportedGate(describe(g))),
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GadgetSpec {
    /// 1-based, in circuit order.
    pub index: usize,
    pub data_qubit: usize,
    #[serde(flatten)]
    pub kind: GadgetKind,
}

/// The classical payload the client needs to decrypt: one basis polynomial
/// per gadget and the final pad as `a_f[0..n]` followed by `b_f[0..n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyUpdateProgram {
    pub qubit_count: usize,
    pub h_list: Vec<KeyPolynomial>,
    pub final_f: Vec<KeyPolynomial>,
    pub gadgets: Vec<GadgetSpec>,
}

impl KeyUpdateProgram {
    pub fn measurement_count(&self) -> usize {
        self.h_list.len()
    }

    pub fn final_a(&self) -> &[KeyPolynomial] {
        &self.final_f[..self.qubit_count]
    }

    pub fn final_b(&self) -> &[KeyPolynomial] {
        &self.final_f[self.qubit_count..]
    }

    /// `h_i` may only reference outcomes of earlier gadgets.
    pub fn check_causality(&self) -> Result<()> {
        for (k, h) in self.h_list.iter().enumerate() {
            let i = k + 1;
            if let Some(j) = h.max_outcome_index().filter(|&j| j >= i) {
                return Err(Error::Invariant(format!(
                    "h({i}) references the outcome of gadget {j}"
                )));
            }
        }
        Ok(())
    }

    pub fn final_key(&self, bindings: &Bindings) -> Result<PauliKey> {
        let eval = |ps: &[KeyPolynomial]| ps.iter().map(|p| p.evaluate(bindings)).collect::<Result<Vec<_>>>();
        PauliKey::new(eval(self.final_a())?, eval(self.final_b())?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(s)?;
        if p.final_f.len() != 2 * p.qubit_count || p.h_list.len() != p.gadgets.len() {
            return Err(Error::validation("key-update program has inconsistent lengths"));
        }
        p.check_causality()?;
        Ok(p)
    }
}

/// Symbolic sweep of `c` over an `n`-qubit pad.
pub fn build_key_update_program(c: &Circuit, n: usize) -> Result<KeyUpdateProgram> {
    if c.qubit_count() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.qubit_count(),
        });
    }
    let rejected: Vec<String> = c
        .gates()
        .iter()
        .filter(|g| classify(g).is_err())
        .map(describe)
        .collect();
    if !rejected.is_empty() {
        return Err(Error::UnsupportedGate(rejected.join("; ")));
    }
    let mut key = SymbolicKey::initial(n);
    let mut h_list = Vec::new();
    let mut gadgets = Vec::new();
    for g in c.gates() {
        match classify(g)? {
            GateClass::Clifford => clifford_key_update(g, &mut key)?,
            GateClass::Gadget(kind) => {
                let q = g.targets()[0];
                let index = gadgets.len() + 1;
                h_list.push(kind.basis_bit(&key.a[q], &key.b[q]));
                let (a, b) = kind.update(&key.a[q], &key.b[q], index);
                key.a[q] = a;
                key.b[q] = b;
                gadgets.push(GadgetSpec {
                    index,
                    data_qubit: q,
                    kind,
                });
            }
        }
    }
    let mut final_f = key.a;
    final_f.extend(key.b);
    let program = KeyUpdateProgram {
        qubit_count: n,
        h_list,
        final_f,
        gadgets,
    };
    program.check_causality()?;
    Ok(program)
}

/// Client-side decryption cost of a program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiCompactness {
    pub qubit_count: usize,
    pub measurement_count: usize,
    pub h_term_counts: Vec<usize>,
    pub f_term_counts: Vec<usize>,
    pub xor_count: usize,
    /// `(M+n)·log₂(M+n)`.
    pub bound: f64,
    /// `2(M+n)·log₂(M+n+2)`.
    pub empirical_bound: f64,
    pub within_empirical_bound: bool,
}

pub fn quasi_compactness_metrics(p: &KeyUpdateProgram) -> QuasiCompactness {
    let m = p.measurement_count();
    let size = (m + p.qubit_count) as f64;
    let xor_count = p.h_list.iter().chain(&p.final_f).map(KeyPolynomial::xor_count).sum();
    let empirical_bound = 2.0 * size * (size + 2.0).log2();
    QuasiCompactness {
        qubit_count: p.qubit_count,
        measurement_count: m,
        h_term_counts: p.h_list.iter().map(KeyPolynomial::term_count).collect(),
        f_term_counts: p.final_f.iter().map(KeyPolynomial::term_count).collect(),
        xor_count,
        bound: if size > 0.0 { size * size.log2() } else { 0.0 },
        empirical_bound,
        within_empirical_bound: xor_count as f64 <= empirical_bound,
    }
}
