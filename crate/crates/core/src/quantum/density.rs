use super::state::{scatter_bits, StateVector};
use super::{eigendecompose_hermitian, log2_exact, max_abs_diff, real, CMatrix, C64, TOLERANCE};
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Mixed state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    qubit_count: usize,
}

impl DensityMatrix {
    /// Validating constructor (Hermitian, trace 1, min eigenvalue ≥ -1e-9).
    pub fn new(entries: CMatrix) -> Result<Self> {
        let dm = Self::unchecked(entries)?;
        dm.validate()?;
        Ok(dm)
    }

    /// Skips the physical-state checks; only the shape is verified.
    pub fn unchecked(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::validation("density matrix must be square"));
        }
        let qubit_count = log2_exact(entries.nrows()).ok_or_else(|| {
            Error::validation(format!(
                "density matrix dimension {} is not a power of two",
                entries.nrows()
            ))
        })?;
        Ok(Self {
            entries,
            qubit_count,
        })
    }

    pub fn from_pure(state: &StateVector) -> Self {
        Self {
            entries: state.outer(),
            qubit_count: state.qubit_count(),
        }
    }

    pub fn maximally_mixed(qubit_count: usize) -> Self {
        let d = 1 << qubit_count;
        Self {
            entries: CMatrix::identity(d, d) * real(1.0 / d as f64),
            qubit_count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_operator()?;
        let tr = self.entries.trace();
        if (tr.re - 1.0).abs() > TOLERANCE || tr.im.abs() > TOLERANCE {
            return Err(Error::validation(format!("density matrix trace is {tr}")));
        }
        Ok(())
    }

    /// Hermitian and positive semidefinite, any trace.
    pub fn validate_operator(&self) -> Result<()> {
        if !is_hermitian(&self.entries) {
            return Err(Error::validation("density matrix is not Hermitian"));
        }
        if self.entries.trace().re <= TOLERANCE {
            return Err(Error::validation("operator has zero trace"));
        }
        let min = eigendecompose_hermitian(&self.entries)?
            .eigenvalues
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -TOLERANCE {
            return Err(Error::validation(format!(
                "density matrix is not positive semidefinite (min eigenvalue {min})"
            )));
        }
        Ok(())
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// `self ⊗ other`; `other` occupies the low-order qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            entries: self.entries.kronecker(&other.entries),
            qubit_count: self.qubit_count + other.qubit_count,
        }
    }

    /// Conjugates by a (controlled) gate: `ρ → U ρ U†`.
    ///
    /// nalgebra stores columns contiguously, so the raw buffer is a 2n-qubit
    /// vector with the row index on the low n qubits and the column index on
    /// the high n qubits. `U` acts on the former and `conj(U)` on the latter.
    pub fn apply_matrix(&mut self, matrix: &CMatrix, targets: &[usize], controls: &[usize]) {
        let n = self.qubit_count;
        let exec = Exec::for_len(self.dim() * self.dim());
        let shift = |qs: &[usize]| qs.iter().map(|q| q + n).collect::<Vec<_>>();
        let rows = super::state::apply_gate(self.entries.as_slice(), matrix, targets, controls, exec);
        let conj = matrix.map(|z| z.conj());
        let both = super::state::apply_gate(&rows, &conj, &shift(targets), &shift(controls), exec);
        self.entries.as_mut_slice().copy_from_slice(&both);
    }

    /// Elementwise `Σ_i α_i ρ_i`, no validation.
    pub fn linear_combination(terms: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
        let first = terms
            .first()
            .ok_or_else(|| Error::validation("empty linear combination"))?;
        let mut acc = CMatrix::zeros(first.1.dim(), first.1.dim());
        for (w, dm) in terms {
            if dm.dim() != acc.nrows() {
                return Err(Error::DimensionMismatch {
                    expected: acc.nrows(),
                    found: dm.dim(),
                });
            }
            acc += &dm.entries * real(*w);
        }
        DensityMatrix::unchecked(acc)
    }

    /// `½ Σ |eig(ρ - σ)|`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let diff = &self.entries - &other.entries;
        let eig = eigendecompose_hermitian(&diff)?;
        Ok(0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }

    pub fn partial_trace(&self, traced: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, traced)
    }
}

pub(crate) fn is_hermitian(m: &CMatrix) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= TOLERANCE
}

/// Traces out `traced` qubits. The remaining qubits keep their relative order.
pub fn partial_trace(dm: &DensityMatrix, traced: &[usize]) -> Result<DensityMatrix> {
    let n = dm.qubit_count();
    let mut traced_sorted = traced.to_vec();
    traced_sorted.sort_unstable();
    traced_sorted.dedup();
    if let Some(&bad) = traced_sorted.iter().find(|&&q| q >= n) {
        return Err(Error::validation(format!(
            "cannot trace qubit {bad} of a {n}-qubit state"
        )));
    }
    if traced_sorted.len() == n {
        return Err(Error::validation(
            "tracing out every qubit leaves a scalar, not a state",
        ));
    }
    let kept: Vec<usize> = (0..n).filter(|q| !traced_sorted.contains(q)).collect();
    let dk = 1 << kept.len();
    let dt = 1 << traced_sorted.len();
    let rho = dm.entries();
    let out = CMatrix::from_fn(dk, dk, |i, j| {
        let (ri, rj) = (scatter_bits(i, &kept), scatter_bits(j, &kept));
        (0..dt)
            .map(|t| {
                let off = scatter_bits(t, &traced_sorted);
                rho[(ri | off, rj | off)]
            })
            .sum()
    });
    DensityMatrix::unchecked(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::c;

    fn bell() -> StateVector {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::new(vec![real(r), real(0.0), real(0.0), real(r)]).unwrap()
    }

    #[test]
    fn bell_halves_are_maximally_mixed() {
        let dm = DensityMatrix::from_pure(&bell());
        for q in 0..2 {
            let r = dm.partial_trace(&[q]).unwrap();
            assert!(r.max_abs_diff(&DensityMatrix::maximally_mixed(1)) < 1e-15);
        }
    }

    #[test]
    fn product_state_trace_recovers_factor() {
        let a = DensityMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[real(0.7), c(0.1, -0.2), c(0.1, 0.2), real(0.3)],
        ))
        .unwrap();
        let b = DensityMatrix::from_pure(&StateVector::from_real(&[0.6, 0.8]).unwrap());
        let joint = a.tensor(&b);
        // b sits on qubit 0
        let r = joint.partial_trace(&[0]).unwrap();
        assert!(r.max_abs_diff(&a) < 1e-12);
        let r = joint.partial_trace(&[1]).unwrap();
        assert!(r.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn tracing_everything_is_an_error() {
        let dm = DensityMatrix::maximally_mixed(2);
        assert!(dm.partial_trace(&[0, 1]).is_err());
        assert!(dm.partial_trace(&[2]).is_err());
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let non_herm =
            CMatrix::from_row_slice(2, 2, &[real(0.5), real(0.1), real(0.0), real(0.5)]);
        assert!(DensityMatrix::new(non_herm).is_err());
        let bad_trace = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative =
            CMatrix::from_row_slice(2, 2, &[real(1.5), real(0.0), real(0.0), real(-0.5)]);
        assert!(DensityMatrix::new(negative).is_err());
    }

    #[test]
    fn conjugation_matches_explicit_product() {
        let u = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.8), c(0.6, 0.0)],
        );
        let rho = DensityMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[real(0.7), c(0.1, -0.2), c(0.1, 0.2), real(0.3)],
        ))
        .unwrap();
        let mut out = rho.clone();
        out.apply_matrix(&u, &[0], &[]);
        let expect = &u * rho.entries() * u.adjoint();
        assert!(max_abs_diff(out.entries(), &expect) < 1e-14);
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states_is_one() {
        let a = DensityMatrix::from_pure(&StateVector::basis(1, 0));
        let b = DensityMatrix::from_pure(&StateVector::basis(1, 1));
        assert!((a.trace_distance(&b).unwrap() - 1.0).abs() < 1e-12);
        assert!(a.trace_distance(&a).unwrap() < 1e-12);
    }
}
