use crate::error::{Error, Result};
use crate::quantum::{c, is_unitary, real, CMatrix, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    #[serde(rename = "S-dagger")]
    Sdg,
    T,
    #[serde(rename = "T-dagger")]
    Tdg,
    #[serde(rename = "CNOT")]
    Cnot,
    #[serde(rename = "SWAP")]
    Swap,
    Rx,
    Ry,
    Rz,
    U1,
    U3,
    #[serde(rename = "controlled-matrix")]
    Matrix,
}

impl GateKind {
    pub fn param_count(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::U1 => 1,
            GateKind::U3 => 3,
            _ => 0,
        }
    }

    pub fn is_t_type(self) -> bool {
        matches!(self, GateKind::T | GateKind::Tdg)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "S-dagger",
            GateKind::T => "T",
            GateKind::Tdg => "T-dagger",
            GateKind::Cnot => "CNOT",
            GateKind::Swap => "SWAP",
            GateKind::Rx => "Rx",
            GateKind::Ry => "Ry",
            GateKind::Rz => "Rz",
            GateKind::U1 => "U1",
            GateKind::U3 => "U3",
            GateKind::Matrix => "controlled-matrix",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One gate of a circuit. `targets[0]` is the least significant bit of the
/// base matrix index; the gate fires when every control qubit is 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GateRecord", into = "GateRecord")]
pub struct Gate {
    kind: GateKind,
    params: Vec<f64>,
    targets: Vec<usize>,
    controls: Vec<usize>,
    matrix: Option<CMatrix>,
}

impl Gate {
    pub fn new(
        kind: GateKind,
        targets: Vec<usize>,
        controls: Vec<usize>,
        params: Vec<f64>,
    ) -> Result<Self> {
        if kind == GateKind::Matrix {
            return Err(Error::validation(
                "controlled-matrix gates need an explicit matrix; use Gate::matrix",
            ));
        }
        let g = Gate {
            kind,
            params,
            targets,
            controls,
            matrix: None,
        };
        g.check()?;
        Ok(g)
    }

    /// Arbitrary unitary on `targets`, optionally controlled.
    pub fn matrix(matrix: CMatrix, targets: Vec<usize>, controls: Vec<usize>) -> Result<Self> {
        let g = Gate {
            kind: GateKind::Matrix,
            params: Vec::new(),
            targets,
            controls,
            matrix: Some(matrix),
        };
        g.check()?;
        Ok(g)
    }

    fn check(&self) -> Result<()> {
        let kind = self.kind;
        if self.params.len() != kind.param_count() {
            return Err(Error::validation(format!(
                "{kind} takes {} parameter(s), got {}",
                kind.param_count(),
                self.params.len()
            )));
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::validation(format!("{kind} has a non-finite angle")));
        }
        let expected_targets = match kind {
            GateKind::Swap => Some(2),
            GateKind::Matrix => None,
            _ => Some(1),
        };
        if let Some(t) = expected_targets {
            if self.targets.len() != t {
                return Err(Error::validation(format!(
                    "{kind} acts on {t} target(s), got {}",
                    self.targets.len()
                )));
            }
        }
        if kind == GateKind::Cnot && self.controls.is_empty() {
            return Err(Error::validation("CNOT needs a control qubit"));
        }
        let mut all: Vec<usize> = self.targets.iter().chain(&self.controls).copied().collect();
        all.sort_unstable();
        let before = all.len();
        all.dedup();
        if all.len() != before {
            return Err(Error::validation(format!(
                "{kind}: targets and controls must be distinct qubits"
            )));
        }
        if let Some(m) = &self.matrix {
            if self.targets.is_empty() || m.nrows() != 1 << self.targets.len() {
                return Err(Error::validation(format!(
                    "matrix of size {}x{} does not fit {} target(s)",
                    m.nrows(),
                    m.ncols(),
                    self.targets.len()
                )));
            }
            if !is_unitary(m, 1e-10) {
                return Err(Error::validation("controlled-matrix payload is not unitary"));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets.iter().chain(&self.controls).copied()
    }

    pub fn max_qubit(&self) -> usize {
        self.qubits().max().unwrap_or(0)
    }

    /// Returns a copy with extra control qubits.
    pub fn controlled_by(mut self, controls: &[usize]) -> Result<Self> {
        self.controls.extend_from_slice(controls);
        self.check()?;
        Ok(self)
    }

    /// Relabels every qubit through `map`.
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> Gate {
        Gate {
            kind: self.kind,
            params: self.params.clone(),
            targets: self.targets.iter().map(|&q| map(q)).collect(),
            controls: self.controls.iter().map(|&q| map(q)).collect(),
            matrix: self.matrix.clone(),
        }
    }

    /// The matrix acting on the targets alone (controls not expanded).
    pub fn base_matrix(&self) -> CMatrix {
        let p = &self.params;
        match self.kind {
            GateKind::X | GateKind::Cnot => m2(real(0.0), real(1.0), real(1.0), real(0.0)),
            GateKind::Y => m2(real(0.0), c(0.0, -1.0), c(0.0, 1.0), real(0.0)),
            GateKind::Z => diag2(real(1.0), real(-1.0)),
            GateKind::H => {
                let s = real(FRAC_1_SQRT_2);
                m2(s, s, s, -s)
            }
            GateKind::S => diag2(real(1.0), c(0.0, 1.0)),
            GateKind::Sdg => diag2(real(1.0), c(0.0, -1.0)),
            GateKind::T => diag2(real(1.0), C64::from_polar(1.0, FRAC_PI_4)),
            GateKind::Tdg => diag2(real(1.0), C64::from_polar(1.0, -FRAC_PI_4)),
            GateKind::Swap => {
                let mut m = CMatrix::zeros(4, 4);
                m[(0, 0)] = real(1.0);
                m[(1, 2)] = real(1.0);
                m[(2, 1)] = real(1.0);
                m[(3, 3)] = real(1.0);
                m
            }
            GateKind::Rx => rx(p[0]),
            GateKind::Ry => ry(p[0]),
            GateKind::Rz => rz(p[0]),
            GateKind::U1 => diag2(real(1.0), C64::from_polar(1.0, p[0])),
            GateKind::U3 => u3(p[0], p[1], p[2]),
            GateKind::Matrix => self.matrix.clone().expect("matrix gate without payload"),
        }
    }

    /// Adjoint gate.
    pub fn inverse(&self) -> Gate {
        let (kind, params) = match self.kind {
            GateKind::S => (GateKind::Sdg, vec![]),
            GateKind::Sdg => (GateKind::S, vec![]),
            GateKind::T => (GateKind::Tdg, vec![]),
            GateKind::Tdg => (GateKind::T, vec![]),
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::U1 => {
                (self.kind, vec![-self.params[0]])
            }
            GateKind::U3 => (
                GateKind::U3,
                vec![-self.params[0], -self.params[2], -self.params[1]],
            ),
            k => (k, self.params.clone()),
        };
        Gate {
            kind,
            params,
            targets: self.targets.clone(),
            controls: self.controls.clone(),
            matrix: self.matrix.as_ref().map(|m| m.adjoint()),
        }
    }
}

/// Dense unitary of `g` with controls expanded. Local index layout: target
/// bits low (targets[0] least significant), control bits above them.
pub fn gate_matrix(g: &Gate) -> CMatrix {
    let base = g.base_matrix();
    let k = base.nrows();
    let dim = k << g.controls().len();
    let mut m = CMatrix::identity(dim, dim);
    let offset = dim - k;
    m.view_mut((offset, offset), (k, k)).copy_from(&base);
    m
}

fn m2(a: C64, b: C64, c_: C64, d: C64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, b, c_, d])
}

fn diag2(a: C64, d: C64) -> CMatrix {
    m2(a, real(0.0), real(0.0), d)
}

/// `e^{-iθX/2}`.
pub fn rx(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    m2(real(co), c(0.0, -s), c(0.0, -s), real(co))
}

/// `e^{-iθY/2}`.
pub fn ry(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    m2(real(co), real(-s), real(s), real(co))
}

/// `e^{-iθZ/2}`.
pub fn rz(theta: f64) -> CMatrix {
    diag2(
        C64::from_polar(1.0, -theta / 2.0),
        C64::from_polar(1.0, theta / 2.0),
    )
}

/// IBM-style `U3(θ, φ, λ)`.
pub fn u3(theta: f64, phi: f64, lambda: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    m2(
        real(co),
        -C64::from_polar(s, lambda),
        C64::from_polar(s, phi),
        C64::from_polar(co, phi + lambda),
    )
}

/// Serialized gate form: `{"kind", "targets", "controls", "params"}` plus an
/// optional `matrix` of `[re, im]` rows for `controlled-matrix`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct GateRecord {
    kind: GateKind,
    targets: Vec<usize>,
    #[serde(default)]
    controls: Vec<usize>,
    #[serde(default)]
    params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

impl TryFrom<GateRecord> for Gate {
    type Error = Error;

    fn try_from(r: GateRecord) -> Result<Self> {
        match (r.kind, r.matrix) {
            (GateKind::Matrix, Some(rows)) => {
                let n = rows.len();
                if rows.iter().any(|row| row.len() != n) {
                    return Err(Error::validation("matrix rows must be square"));
                }
                let m = CMatrix::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1]));
                Gate::matrix(m, r.targets, r.controls)
            }
            (GateKind::Matrix, None) => Err(Error::validation(
                "controlled-matrix gate is missing its `matrix` field",
            )),
            (kind, _) => Gate::new(kind, r.targets, r.controls, r.params),
        }
    }
}

impl From<Gate> for GateRecord {
    fn from(g: Gate) -> Self {
        let matrix = g.matrix.as_ref().map(|m| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect()
        });
        GateRecord {
            kind: g.kind,
            targets: g.targets,
            controls: g.controls,
            params: g.params,
            matrix,
        }
    }
}

/// Shorthand constructors; these panic only on programmer error (the
/// arguments are statically well-formed apart from qubit distinctness).
pub mod gates {
    use super::*;

    fn one(kind: GateKind, q: usize, params: Vec<f64>) -> Gate {
        Gate::new(kind, vec![q], vec![], params).expect("single-qubit gate")
    }

    pub fn x(q: usize) -> Gate {
        one(GateKind::X, q, vec![])
    }
    pub fn y(q: usize) -> Gate {
        one(GateKind::Y, q, vec![])
    }
    pub fn z(q: usize) -> Gate {
        one(GateKind::Z, q, vec![])
    }
    pub fn h(q: usize) -> Gate {
        one(GateKind::H, q, vec![])
    }
    pub fn s(q: usize) -> Gate {
        one(GateKind::S, q, vec![])
    }
    pub fn sdg(q: usize) -> Gate {
        one(GateKind::Sdg, q, vec![])
    }
    pub fn t(q: usize) -> Gate {
        one(GateKind::T, q, vec![])
    }
    pub fn tdg(q: usize) -> Gate {
        one(GateKind::Tdg, q, vec![])
    }
    pub fn rx(q: usize, theta: f64) -> Gate {
        one(GateKind::Rx, q, vec![theta])
    }
    pub fn ry(q: usize, theta: f64) -> Gate {
        one(GateKind::Ry, q, vec![theta])
    }
    pub fn rz(q: usize, theta: f64) -> Gate {
        one(GateKind::Rz, q, vec![theta])
    }
    pub fn u1(q: usize, lambda: f64) -> Gate {
        one(GateKind::U1, q, vec![lambda])
    }
    pub fn u3(q: usize, theta: f64, phi: f64, lambda: f64) -> Gate {
        one(GateKind::U3, q, vec![theta, phi, lambda])
    }
    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::new(GateKind::Cnot, vec![target], vec![control], vec![]).expect("distinct qubits")
    }
    pub fn swap(a: usize, b: usize) -> Gate {
        Gate::new(GateKind::Swap, vec![a, b], vec![], vec![]).expect("distinct qubits")
    }
}

#[cfg(test)]
mod tests {
    use super::gates::*;
    use super::*;
    use crate::quantum::{matrices_equal_up_to_phase, max_abs_diff};
    use std::f64::consts::PI;

    #[test]
    fn t_matrix() {
        let m = gate_matrix(&t(0));
        assert!((m[(1, 1)] - C64::from_polar(1.0, PI / 4.0)).norm() < 1e-15);
        assert_eq!(m[(0, 0)], real(1.0));
    }

    #[test]
    fn rx_minus_half_pi_is_u3_form() {
        let s = FRAC_1_SQRT_2;
        let expect = m2(real(s), c(0.0, s), c(0.0, s), real(s));
        assert!(max_abs_diff(&super::rx(-PI / 2.0), &expect) < 1e-15);
        assert!(max_abs_diff(&super::u3(-PI / 2.0, -PI / 2.0, PI / 2.0), &expect) < 1e-15);
    }

    #[test]
    fn zero_rotation_is_identity() {
        assert!(max_abs_diff(&gate_matrix(&super::gates::ry(0, 0.0)), &CMatrix::identity(2, 2)) < 1e-15);
    }

    #[test]
    fn every_kind_is_unitary_and_inverse_is_adjoint() {
        let gs = vec![
            x(0),
            y(0),
            z(0),
            h(0),
            s(0),
            sdg(0),
            t(0),
            tdg(0),
            cnot(0, 1),
            swap(0, 1),
            super::gates::rx(0, 0.3),
            super::gates::ry(0, -1.1),
            super::gates::rz(0, 2.2),
            u1(0, 0.7),
            super::gates::u3(0, 0.4, 1.3, -0.2),
            Gate::matrix(super::u3(0.1, 0.2, 0.3), vec![1], vec![0]).unwrap(),
        ];
        for g in gs {
            let m = gate_matrix(&g);
            assert!(is_unitary(&m, 1e-10), "{}", g.kind());
            let inv = gate_matrix(&g.inverse());
            assert!(max_abs_diff(&inv, &m.adjoint()) < 1e-14, "{}", g.kind());
        }
    }

    #[test]
    fn u1_equals_rz_up_to_phase() {
        assert!(matrices_equal_up_to_phase(&gate_matrix(&u1(0, 0.9)), &super::rz(0.9), 1e-14));
    }

    #[test]
    fn malformed_gates_rejected() {
        assert!(Gate::new(GateKind::Rx, vec![0], vec![], vec![]).is_err());
        assert!(Gate::new(GateKind::U3, vec![0], vec![], vec![1.0]).is_err());
        assert!(Gate::new(GateKind::H, vec![0], vec![0], vec![]).is_err());
        assert!(Gate::new(GateKind::Cnot, vec![0], vec![], vec![]).is_err());
        assert!(Gate::new(GateKind::Swap, vec![0], vec![], vec![]).is_err());
        assert!(Gate::matrix(CMatrix::identity(2, 2) * real(2.0), vec![0], vec![]).is_err());
    }

    #[test]
    fn json_shape() {
        let g = cnot(2, 0);
        let v = serde_json::to_value(&g).unwrap();
        assert_eq!(v["kind"], "CNOT");
        assert_eq!(v["targets"], serde_json::json!([0]));
        assert_eq!(v["controls"], serde_json::json!([2]));
        let m: Gate = serde_json::from_value(serde_json::json!({
            "kind": "controlled-matrix", "targets": [0], "controls": [1],
            "matrix": [[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]
        }))
        .unwrap();
        assert!(max_abs_diff(&m.base_matrix(), &gate_matrix(&x(0))) < 1e-15);
    }
}
