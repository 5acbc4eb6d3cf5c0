use super::phase::{PhaseEstimationConfig, QpceLayout};
use crate::circuit::{gates, Circuit};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// How the ancilla amplitude depends on the estimated eigenvalue `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Interpretation {
    /// Amplitude `η(λ-τ)/λ`; the output weights are `(λ-τ)`.
    #[default]
    #[serde(rename = "eq7")]
    Subtractive,
    /// Output weights `(1-τ/λ)`, scaled so the largest amplitude is `η`.
    #[serde(rename = "paper")]
    Ratio,
}

impl Interpretation {
    pub fn name(self) -> &'static str {
        match self {
            Interpretation::Subtractive => "eq7",
            Interpretation::Ratio => "paper",
        }
    }

    /// Weight of eigenvalue `lambda` in the filtered output, before
    /// normalization.
    pub fn output_weight(self, lambda: f64, tau: f64) -> f64 {
        if lambda <= tau || lambda <= 0.0 {
            return 0.0;
        }
        match self {
            Interpretation::Subtractive => lambda - tau,
            Interpretation::Ratio => 1.0 - tau / lambda,
        }
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Interpretation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eq7" => Ok(Interpretation::Subtractive),
            "paper" => Ok(Interpretation::Ratio),
            other => Err(Error::validation(format!(
                "unknown interpretation `{other}` (expected eq7 or paper)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub tau: f64,
    pub eta: f64,
    pub interpretation: Interpretation,
}

impl ThresholdConfig {
    pub fn new(tau: f64, eta: f64, interpretation: Interpretation) -> Result<Self> {
        let cfg = Self {
            tau,
            eta,
            interpretation,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::validation(format!("tau must be ≥ 0, got {}", self.tau)));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::validation(format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        Ok(())
    }
}

/// Ancilla `|1⟩` amplitude for every register value.
pub fn rotation_amplitudes(cfg: &ThresholdConfig, pe: &PhaseEstimationConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    pe.validate()?;
    let lambdas: Vec<f64> = (0..pe.slices()).map(|m| pe.eigenvalue_of(m)).collect();
    let amps = match cfg.interpretation {
        Interpretation::Subtractive => lambdas
            .iter()
            .map(|&l| cfg.eta * cfg.interpretation.output_weight(l, cfg.tau))
            .zip(&lambdas)
            .map(|(w, &l)| if w > 0.0 { w / l } else { 0.0 })
            .collect(),
        Interpretation::Ratio => {
            let raw: Vec<f64> = lambdas
                .iter()
                .map(|&l| cfg.interpretation.output_weight(l, cfg.tau) / l.max(f64::MIN_POSITIVE))
                .collect();
            let g = raw.iter().cloned().fold(0.0, f64::max);
            if g == 0.0 {
                raw
            } else {
                raw.into_iter().map(|r| cfg.eta * r / g).collect()
            }
        }
    };
    Ok(amps)
}

/// Ancilla rotation conditioned on each register value: `Ry(2·asin a_m)`
/// with all register qubits as controls, zero bits flipped around it.
pub fn build_threshold_rotation(
    cfg: &ThresholdConfig,
    pe: &PhaseEstimationConfig,
    layout: &QpceLayout,
) -> Result<Circuit> {
    if layout.register_bits != pe.precision_bits {
        return Err(Error::DimensionMismatch {
            expected: pe.precision_bits,
            found: layout.register_bits,
        });
    }
    let amps = rotation_amplitudes(cfg, pe)?;
    let register = layout.register();
    let mut circuit = Circuit::new(layout.total());
    for (m, &a) in amps.iter().enumerate() {
        if a <= 0.0 {
            continue;
        }
        let zeros: Vec<usize> = register
            .iter()
            .enumerate()
            .filter(|(k, _)| (m >> k) & 1 == 0)
            .map(|(_, &q)| q)
            .collect();
        for &q in &zeros {
            circuit.push(gates::x(q))?;
        }
        let theta = 2.0 * a.min(1.0).asin();
        circuit.push(gates::ry(layout.ancilla(), theta).controlled_by(&register)?)?;
        for &q in &zeros {
            circuit.push(gates::x(q))?;
        }
    }
    Ok(circuit)
}
