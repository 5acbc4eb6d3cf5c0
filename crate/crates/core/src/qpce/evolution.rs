use crate::error::{Error, Result};
use crate::quantum::{eigendecompose_hermitian, partial_trace, CMatrix, DensityMatrix, C64};

/// `e^{iHt}` for Hermitian `H`, computed through its spectrum.
pub fn hamiltonian_exponential(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let eig = eigendecompose_hermitian(h)?;
    Ok(eig.map_spectrum(|l| C64::from_polar(1.0, l * t)))
}

/// Permutation matrix exchanging the high and low halves of a
/// `(d·d)`-dimensional register.
fn swap_operator(d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = C64::new(1.0, 0.0);
        }
    }
    s
}

/// One density-matrix exponentiation step:
/// `tr_P[e^{-iS·dt} (ρ ⊗ σ) e^{iS·dt}]`, with `ρ` on the traced (high) half.
/// Uses `e^{-iS·dt} = cos(dt)·I - i·sin(dt)·S`, exact because `S² = I`.
pub fn swap_trick_step(rho: &DensityMatrix, sigma: &DensityMatrix, dt: f64) -> Result<DensityMatrix> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let d = rho.dim();
    let n = rho.qubit_count();
    let s = swap_operator(d);
    let (sin, cos) = dt.sin_cos();
    let u = CMatrix::identity(d * d, d * d) * C64::new(cos, 0.0) - s * C64::new(0.0, sin);
    let joint = rho.tensor(sigma);
    let evolved = &u * joint.entries() * u.adjoint();
    let traced: Vec<usize> = (n..2 * n).collect();
    partial_trace(&DensityMatrix::unchecked(evolved)?, &traced)
}

/// Applies `steps` swap-trick steps of size `t/steps` to `sigma`, each with a
/// fresh copy of `rho`.
pub fn swap_trick_evolve(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    t: f64,
    steps: usize,
) -> Result<DensityMatrix> {
    if steps == 0 {
        return Err(Error::validation("need at least one swap-trick step"));
    }
    let dt = t / steps as f64;
    let mut out = sigma.clone();
    for _ in 0..steps {
        out = swap_trick_step(rho, &out, dt)?;
    }
    Ok(out)
}

/// `e^{-iρt} σ e^{iρt}` through the spectral route.
pub fn exact_evolution(rho: &DensityMatrix, sigma: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let u = hamiltonian_exponential(rho.entries(), -t)?;
    DensityMatrix::unchecked(&u * sigma.entries() * u.adjoint())
}

/// `σ - i·dt·[ρ, σ]`, the first-order expansion of one step.
pub fn first_order(rho: &DensityMatrix, sigma: &DensityMatrix, dt: f64) -> CMatrix {
    let (r, s) = (rho.entries(), sigma.entries());
    let comm = r * s - s * r;
    s - comm * C64::new(0.0, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{matrices_equal_up_to_phase, max_abs_diff, real, StateVector};
    use std::f64::consts::PI;

    fn example() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(1.5), real(0.5), real(0.5), real(1.5)])
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::from_pure(&StateVector::from_real(&[0.5f64.sqrt(), 0.5f64.sqrt()]).unwrap())
    }

    fn zero() -> DensityMatrix {
        DensityMatrix::from_pure(&StateVector::zero(1))
    }

    #[test]
    fn zero_time_is_identity() {
        let u = hamiltonian_exponential(&example(), 0.0).unwrap();
        assert!(max_abs_diff(&u, &CMatrix::identity(2, 2)) < 1e-14);
    }

    #[test]
    fn minus_pi_gives_x_up_to_phase() {
        let u = hamiltonian_exponential(&example(), -PI).unwrap();
        let x = CMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]);
        assert!(matrices_equal_up_to_phase(&u, &x, 1e-12));
    }

    #[test]
    fn spectral_route_matches_pade_exponential() {
        let h = CMatrix::from_row_slice(
            2,
            2,
            &[real(0.7), C64::new(0.2, -0.1), C64::new(0.2, 0.1), real(0.3)],
        );
        let a = hamiltonian_exponential(&h, 1.3).unwrap();
        let b = (h * C64::new(0.0, 1.3)).exp();
        assert!(max_abs_diff(&a, &b) < 1e-12);
    }

    #[test]
    fn swap_trick_zero_step_and_commuting_case() {
        let out = swap_trick_step(&plus(), &zero(), 0.0).unwrap();
        assert!(out.max_abs_diff(&zero()) < 1e-15);
        for dt in [0.1, 0.05] {
            let out = swap_trick_step(&plus(), &plus(), dt).unwrap();
            assert!(out.max_abs_diff(&plus()) < 1e-14);
        }
    }

    #[test]
    fn swap_trick_against_pade_exponential() {
        let dt = 0.01;
        let (rho, sigma) = (plus(), zero());
        let s = swap_operator(2);
        let u = (s * C64::new(0.0, -dt)).exp();
        let joint = rho.tensor(&sigma);
        let evolved = DensityMatrix::unchecked(&u * joint.entries() * u.adjoint()).unwrap();
        let oracle = partial_trace(&evolved, &[1]).unwrap();
        let out = swap_trick_step(&rho, &sigma, dt).unwrap();
        assert!(out.max_abs_diff(&oracle) < 1e-14);
        let excess = (out.entries() - first_order(&rho, &sigma, dt)).norm();
        assert!(excess < 10.0 * dt * dt, "{excess}");
    }

    #[test]
    fn swap_trick_mismatch() {
        assert!(swap_trick_step(&plus(), &DensityMatrix::maximally_mixed(2), 0.1).is_err());
    }
}
