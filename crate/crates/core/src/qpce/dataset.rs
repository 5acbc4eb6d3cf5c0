use crate::error::{Error, Result};
use crate::quantum::{real, CMatrix, DensityMatrix, StateVector, C64, TOLERANCE};
use std::path::Path;

/// `M` real sample vectors of a common dimension `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    vectors: Vec<Vec<f64>>,
    mean: Vec<f64>,
}

impl Dataset {
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let dim = vectors
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::validation("dataset is empty"))?;
        if dim == 0 {
            return Err(Error::validation("dataset vectors must have dimension ≥ 1"));
        }
        if let Some((i, v)) = vectors.iter().enumerate().find(|(_, v)| v.len() != dim) {
            return Err(Error::validation(format!(
                "vector {i} has dimension {}, expected {dim}",
                v.len()
            )));
        }
        let mut mean = vec![0.0; dim];
        for v in &vectors {
            for (m, x) in mean.iter_mut().zip(v) {
                *m += x;
            }
        }
        let m = vectors.len() as f64;
        mean.iter_mut().for_each(|x| *x /= m);
        Ok(Self { vectors, mean })
    }

    /// One vector per CSV row, no header.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut vectors = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| Error::validation(format!("bad number `{f}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            vectors.push(row);
        }
        Self::new(vectors)
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Subtracts the mean from every vector, then scales each to unit norm.
    pub fn standardize(&self) -> Result<Dataset> {
        let mut out = Vec::with_capacity(self.len());
        for (i, v) in self.vectors.iter().enumerate() {
            let centered: Vec<f64> = v.iter().zip(&self.mean).map(|(x, m)| x - m).collect();
            let norm = centered.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-12 {
                return Err(Error::validation(format!(
                    "vector {i} equals the dataset mean and vanishes after centering"
                )));
            }
            out.push(centered.into_iter().map(|x| x / norm).collect());
        }
        Dataset::new(out)
    }
}

/// `v / ‖v‖`, zero-padded to the next power of two.
pub fn amplitude_encode(v: &[f64]) -> Result<StateVector> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if v.is_empty() || norm < 1e-15 {
        return Err(Error::validation("cannot amplitude-encode a zero vector"));
    }
    let dim = v.len().next_power_of_two();
    let mut amps: Vec<C64> = v.iter().map(|x| real(x / norm)).collect();
    amps.resize(dim, C64::default());
    StateVector::new(amps)
}

/// Row-major `vec(ρ) / ‖ρ‖_F`: row index on the high qubits.
pub fn encode_density(rho: &DensityMatrix) -> Result<StateVector> {
    let d = rho.dim();
    let m = rho.entries();
    let amps: Vec<C64> = (0..d * d).map(|k| m[(k / d, k % d)]).collect();
    StateVector::subnormalized(amps)?.normalized()
}

/// `ρ = (1/M) Σ_k |v_k⟩⟨v_k|` over a standardized dataset.
pub fn covariance_density(d: &Dataset) -> Result<DensityMatrix> {
    let dim = d.dim().next_power_of_two();
    let mut rho = CMatrix::zeros(dim, dim);
    for (k, v) in d.vectors().iter().enumerate() {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::validation(format!(
                "vector {k} has norm {norm}; standardize the dataset first"
            )));
        }
        for (i, a) in v.iter().enumerate() {
            for (j, b) in v.iter().enumerate() {
                rho[(i, j)] += real(a * b);
            }
        }
    }
    rho /= real(d.len() as f64);
    DensityMatrix::new(rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standardize_two_points() {
        let d = Dataset::new(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(d.mean(), &[2.0, 3.0]);
        let s = d.standardize().unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.vectors()[0][0] + r).abs() < 1e-15 && (s.vectors()[0][1] + r).abs() < 1e-15);
        assert!((s.vectors()[1][0] - r).abs() < 1e-15 && (s.vectors()[1][1] - r).abs() < 1e-15);
        assert!(s.mean().iter().all(|m| m.abs() < 1e-12));
    }

    #[test]
    fn centered_unit_vectors_are_fixed() {
        let d = Dataset::new(vec![vec![0.6, 0.8], vec![-0.6, -0.8]]).unwrap();
        let s = d.standardize().unwrap();
        for (a, b) in s.vectors().iter().flatten().zip(d.vectors().iter().flatten()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_vector_is_degenerate() {
        let d = Dataset::new(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let err = d.standardize().unwrap_err().to_string();
        assert!(err.contains("vector 0"), "{err}");
    }

    #[test]
    fn ragged_dataset_rejected() {
        assert!(Dataset::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(Dataset::new(vec![]).is_err());
    }

    #[test]
    fn encode_reported_vector() {
        let s = amplitude_encode(&[1.5, 0.5, 0.5, 1.5]).unwrap();
        let expect = [0.6708, 0.2236, 0.2236, 0.6708];
        for (a, e) in s.amplitudes().iter().zip(expect) {
            assert!((a.re - e).abs() < 1e-4);
        }
    }

    #[test]
    fn encode_basis_and_padding() {
        let s = amplitude_encode(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(s, StateVector::zero(2));
        let s = amplitude_encode(&[1.0, 2.0, 2.0]).unwrap();
        assert_eq!(s.dim(), 4);
        assert_eq!(s.amplitudes()[3], C64::default());
        assert!((s.amplitudes()[1].re - 2.0 / 3.0).abs() < 1e-15);
        assert!(amplitude_encode(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn covariance_cases() {
        let d = Dataset::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let rho = covariance_density(&d).unwrap();
        assert!(rho.max_abs_diff(&DensityMatrix::maximally_mixed(1)) < 1e-15);
        let single = Dataset::new(vec![vec![0.6, 0.8]]).unwrap();
        let p = covariance_density(&single).unwrap();
        let sq = p.entries() * p.entries();
        assert!(crate::quantum::max_abs_diff(&sq, p.entries()) < 1e-15);
        let raw = Dataset::new(vec![vec![2.0, 0.0]]).unwrap();
        assert!(covariance_density(&raw).is_err());
    }
}
