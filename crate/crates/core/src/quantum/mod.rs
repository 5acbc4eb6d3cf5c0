//! Dense complex linear algebra for small quantum registers.
//!
//! Qubit ordering is little-endian throughout: qubit `q` is bit `q` of an
//! amplitude index, and printed bitstrings put qubit 0 in the rightmost
//! position.

mod density;
mod eigen;
mod sampling;
mod state;

pub use density::{partial_trace, DensityMatrix};
pub use eigen::{eigendecompose, eigendecompose_hermitian, EigenDecomposition};
pub use sampling::{bitstring, derive_seed, sample_measurement, seeded_rng, MeasurementHistogram, SimRng};
pub(crate) use sampling::draw as sampling_draw;
pub use state::{fidelity, overlap, StateVector};

pub use num_complex::Complex64 as C64;

use nalgebra::DMatrix;

/// Dense complex matrix used for operators and density matrices.
pub type CMatrix = DMatrix<C64>;

/// Normalization and Hermiticity tolerance used by the validating constructors.
pub const TOLERANCE: f64 = 1e-9;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Kronecker product `a ⊗ b`; `b` occupies the low-order index bits.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Returns true when `u` equals `v` up to a global phase, comparing after
/// normalizing by the phase of the largest-magnitude entry of `u`.
pub fn equal_up_to_phase(u: &[C64], v: &[C64], tol: f64) -> bool {
    if u.len() != v.len() {
        return false;
    }
    let Some(pivot) = largest_index(u) else {
        return v.iter().all(|x| x.norm() <= tol);
    };
    if v[pivot].norm() <= tol {
        return false;
    }
    let phase = (v[pivot] / u[pivot]).unscale((v[pivot] / u[pivot]).norm());
    u.iter().zip(v).all(|(a, b)| (a * phase - b).norm() <= tol)
}

/// Matrix version of [`equal_up_to_phase`].
pub fn matrices_equal_up_to_phase(u: &CMatrix, v: &CMatrix, tol: f64) -> bool {
    u.shape() == v.shape() && equal_up_to_phase(u.as_slice(), v.as_slice(), tol)
}

pub(crate) fn largest_index(v: &[C64]) -> Option<usize> {
    let max = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return None;
    }
    v.iter().position(|x| x.norm() >= max - 1e-12)
}

pub(crate) fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

pub(crate) fn log2_exact(n: usize) -> Option<usize> {
    is_power_of_two(n).then(|| n.trailing_zeros() as usize)
}

/// Checks that `u† u = I` within `tol`.
pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    if !u.is_square() {
        return false;
    }
    let prod = u.adjoint() * u;
    max_abs_diff(&prod, &CMatrix::identity(u.nrows(), u.ncols())) <= tol
}
