use super::density::is_hermitian;
use super::{largest_index, CMatrix, DensityMatrix, C64};
use crate::error::{Error, Result};
use std::cmp::Ordering;

/// Spectral decomposition with eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors, phase-fixed so their largest-magnitude entry is
    /// real and positive.
    pub eigenvectors: Vec<Vec<C64>>,
    /// Binary label of each eigen-index, `⌈log₂ dim⌉` bits wide.
    pub register_labels: Vec<String>,
}

impl EigenDecomposition {
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.eigenvectors.first().map_or(0, Vec::len);
        let mut m = CMatrix::zeros(d, d);
        for (l, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let col = nalgebra::DVector::from_column_slice(v);
            m += (&col * col.adjoint()) * C64::new(*l, 0.0);
        }
        m
    }

    /// Applies `f` to the spectrum: `Σ f(λ_k) v_k v_k†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let d = self.eigenvectors.first().map_or(0, Vec::len);
        let mut m = CMatrix::zeros(d, d);
        for (l, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let col = nalgebra::DVector::from_column_slice(v);
            m += (&col * col.adjoint()) * f(*l);
        }
        m
    }
}

pub fn eigendecompose(dm: &DensityMatrix) -> Result<EigenDecomposition> {
    eigendecompose_hermitian(dm.entries())
}

/// Eigendecomposition of any Hermitian matrix. Exact ties (within 1e-9) are
/// ordered lexicographically by eigenvector components.
pub fn eigendecompose_hermitian(m: &CMatrix) -> Result<EigenDecomposition> {
    if !is_hermitian(m) {
        return Err(Error::validation("eigendecomposition needs a Hermitian matrix"));
    }
    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut pairs: Vec<(f64, Vec<C64>)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&l, col)| (l, fix_phase(col.iter().copied().collect())))
        .collect();
    pairs.sort_by(|a, b| {
        if (a.0 - b.0).abs() <= 1e-9 {
            lexicographic(&a.1, &b.1)
        } else {
            b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal)
        }
    });
    let width = (usize::BITS - (pairs.len().max(2) - 1).leading_zeros()) as usize;
    let register_labels = (0..pairs.len())
        .map(|k| format!("{k:0width$b}"))
        .collect();
    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
        register_labels,
    })
}

fn fix_phase(mut v: Vec<C64>) -> Vec<C64> {
    if let Some(p) = largest_index(&v) {
        let phase = v[p].conj() / v[p].norm();
        for x in &mut v {
            *x *= phase;
        }
        v[p].im = 0.0;
    }
    v
}

fn lexicographic(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        for (p, q) in [(x.re, y.re), (x.im, y.im)] {
            if (p - q).abs() > 1e-12 {
                return p.partial_cmp(&q).unwrap_or(Ordering::Equal);
            }
        }
    }
    Ordering::Equal
}
