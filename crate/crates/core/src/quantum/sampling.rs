use super::StateVector;
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;

/// The simulator's random source: ChaCha with 8 rounds, seeded from a `u64`
/// through `SeedableRng::seed_from_u64`. Streams are stable across platforms.
pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent per-trial seed: first word of ChaCha stream `stream` under `root`.
pub fn derive_seed(root: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(stream);
    rand::RngCore::next_u64(&mut rng)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementHistogram {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: u64,
}

impl MeasurementHistogram {
    pub fn frequency(&self, key: &str) -> f64 {
        self.counts.get(key).copied().unwrap_or(0) as f64 / self.shots as f64
    }

    /// Writes the `bitstring,count` CSV form.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bitstring", "count"])?;
        for (k, v) in &self.counts {
            w.write_record([k.as_str(), &v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(input: R, shots_seed: u64) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut counts = BTreeMap::new();
        for rec in r.records() {
            let rec = rec?;
            let count: u64 = rec[1]
                .trim()
                .parse()
                .map_err(|e| Error::validation(format!("bad count `{}`: {e}", &rec[1])))?;
            counts.insert(rec[0].to_string(), count);
        }
        let shots = counts.values().sum();
        Ok(Self {
            counts,
            shots,
            seed: shots_seed,
        })
    }
}

/// Formats outcome `value` over `width` measured qubits; bit 0 (the first
/// measured qubit) is printed rightmost.
pub fn bitstring(value: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|k| if (value >> k) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Samples `shots` computational-basis measurements of `qubits`.
pub fn sample_measurement(
    state: &StateVector,
    qubits: &[usize],
    shots: u64,
    seed: u64,
) -> Result<MeasurementHistogram> {
    if qubits.is_empty() {
        return Err(Error::validation("no qubits to measure"));
    }
    if shots == 0 {
        return Err(Error::validation("shots must be at least 1"));
    }
    if let Some(&q) = qubits.iter().find(|&&q| q >= state.qubit_count()) {
        return Err(Error::validation(format!("qubit {q} out of range")));
    }
    let probs = state.marginal_probabilities(qubits);
    let total: f64 = probs.iter().sum();
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p / total;
        cumulative.push(acc);
    }
    let mut rng = seeded_rng(seed);
    let mut tallies = vec![0u64; probs.len()];
    for _ in 0..shots {
        tallies[draw(&cumulative, &probs, rng.random::<f64>())] += 1;
    }
    let counts = tallies
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(v, c)| (bitstring(v, qubits.len()), c))
        .collect();
    Ok(MeasurementHistogram {
        counts,
        shots,
        seed,
    })
}

/// Inverse-CDF lookup that never lands on a zero-probability outcome.
pub(crate) fn draw(cumulative: &[f64], probs: &[f64], u: f64) -> usize {
    let idx = cumulative.partition_point(|&c| c <= u);
    let idx = idx.min(cumulative.len() - 1);
    if probs[idx] > 0.0 {
        return idx;
    }
    (0..idx)
        .rev()
        .chain(idx + 1..probs.len())
        .find(|&i| probs[i] > 0.0)
        .unwrap_or(idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::real;

    #[test]
    fn deterministic_outcome() {
        let h = sample_measurement(&StateVector::zero(1), &[0], 100, 7).unwrap();
        assert_eq!(h.counts.len(), 1);
        assert_eq!(h.counts["0"], 100);
    }

    #[test]
    fn bell_state_only_correlated_keys() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(vec![real(r), real(0.0), real(0.0), real(r)]).unwrap();
        let h = sample_measurement(&bell, &[0, 1], 1000, 3).unwrap();
        assert!(h.counts.keys().all(|k| k == "00" || k == "11"));
        assert_eq!(h.counts.values().sum::<u64>(), 1000);
    }

    #[test]
    fn same_seed_same_histogram() {
        let s = StateVector::from_real(&[0.6, 0.0, 0.0, 0.8]).unwrap();
        let a = sample_measurement(&s, &[0, 1], 500, 11).unwrap();
        let b = sample_measurement(&s, &[0, 1], 500, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_qubit_list_is_an_error() {
        assert!(sample_measurement(&StateVector::zero(1), &[], 10, 0).is_err());
        assert!(sample_measurement(&StateVector::zero(1), &[0], 0, 0).is_err());
    }

    #[test]
    fn bitstring_is_little_endian() {
        assert_eq!(bitstring(0b001, 3), "001");
        assert_eq!(bitstring(0b110, 3), "110");
    }

    #[test]
    fn csv_round_trip() {
        let s = StateVector::from_real(&[0.6, 0.0, 0.0, 0.8]).unwrap();
        let h = sample_measurement(&s, &[0, 1], 300, 1).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let back = MeasurementHistogram::read_csv(&buf[..], 1).unwrap();
        assert_eq!(back, h);
    }
}
