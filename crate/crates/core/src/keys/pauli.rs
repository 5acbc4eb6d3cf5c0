use crate::circuit::gates;
use crate::error::{Error, Result};
use crate::quantum::{seeded_rng, DensityMatrix, StateVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicU64, Ordering};

static NEXT_SERIAL: AtomicU64 = AtomicU64::new(1);

/// One-time-pad key `X^a Z^b` on `n` qubits. Every key carries a process-wide
/// serial so a holder can refuse to encrypt twice with the same key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliKey {
    pub a: Vec<u8>,
    pub b: Vec<u8>,
    #[serde(default)]
    pub serial: u64,
}

impl PauliKey {
    pub fn new(a: Vec<u8>, b: Vec<u8>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        if a.iter().chain(&b).any(|&x| x > 1) {
            return Err(Error::validation("key bits must be 0 or 1"));
        }
        Ok(Self {
            a,
            b,
            serial: NEXT_SERIAL.fetch_add(1, Ordering::Relaxed),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![0; n], vec![0; n]).expect("equal lengths")
    }

    /// All `4^n` keys in lexicographic order of `(a, b)`.
    pub fn all(n: usize) -> impl Iterator<Item = PauliKey> {
        (0..1usize << (2 * n)).map(move |k| {
            let a = (0..n).map(|q| ((k >> (n + q)) & 1) as u8).collect();
            let b = (0..n).map(|q| ((k >> q) & 1) as u8).collect();
            Self::new(a, b).expect("equal lengths")
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.a.len()
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.qubit_count() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.qubit_count(),
            });
        }
        Ok(())
    }
}

/// Uniform `2n`-bit key, reproducible under `seed`.
pub fn keygen(n: usize, seed: u64) -> Result<PauliKey> {
    if n == 0 {
        return Err(Error::validation("key length must be at least one qubit"));
    }
    let mut rng = seeded_rng(seed);
    let a = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    let b = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    PauliKey::new(a, b)
}

/// `ρ → X^a Z^b ρ Z^b X^a`.
pub fn qotp_encrypt(rho: &DensityMatrix, k: &PauliKey) -> Result<DensityMatrix> {
    k.check(rho.qubit_count())?;
    let mut out = rho.clone();
    for q in 0..k.qubit_count() {
        if k.b[q] == 1 {
            out.apply_matrix(&gates::z(q).base_matrix(), &[q], &[]);
        }
        if k.a[q] == 1 {
            out.apply_matrix(&gates::x(q).base_matrix(), &[q], &[]);
        }
    }
    Ok(out)
}

/// `φ → X^a Z^b φ Z^b X^a`. The pad is Hermitian up to a sign that cancels
/// under conjugation, so decryption is the same map.
pub fn qotp_decrypt(phi: &DensityMatrix, k: &PauliKey) -> Result<DensityMatrix> {
    qotp_encrypt(phi, k)
}

/// Pure-state pad `|ψ⟩ → X^a Z^b |ψ⟩`.
pub fn qotp_encrypt_state(psi: &StateVector, k: &PauliKey) -> Result<StateVector> {
    k.check(psi.qubit_count())?;
    let mut out = psi.clone();
    for q in 0..k.qubit_count() {
        if k.b[q] == 1 {
            out.apply_matrix(&gates::z(q).base_matrix(), &[q], &[]);
        }
        if k.a[q] == 1 {
            out.apply_matrix(&gates::x(q).base_matrix(), &[q], &[]);
        }
    }
    Ok(out)
}

/// Inverse of [`qotp_encrypt_state`]: `Z^b X^a`.
pub fn qotp_decrypt_state(psi: &StateVector, k: &PauliKey) -> Result<StateVector> {
    k.check(psi.qubit_count())?;
    let mut out = psi.clone();
    for q in 0..k.qubit_count() {
        if k.a[q] == 1 {
            out.apply_matrix(&gates::x(q).base_matrix(), &[q], &[]);
        }
        if k.b[q] == 1 {
            out.apply_matrix(&gates::z(q).base_matrix(), &[q], &[]);
        }
    }
    Ok(out)
}
