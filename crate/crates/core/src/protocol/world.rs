use crate::circuit::{measure_forced, measure_qubits, Gate};
use crate::error::{Error, Result};
use crate::quantum::{SimRng, StateVector, C64};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashSet};

/// When queued gates are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlushPolicy {
    /// Gates run only when a measurement or readout depends on them; fresh
    /// qubits join the simulated state on first use.
    #[default]
    Lazy,
    /// Every gate runs immediately and fresh qubits are materialized at once.
    Eager,
}

/// Shared simulated state addressed by stable qubit ids.
#[derive(Debug, Clone)]
pub struct QuantumWorld {
    policy: FlushPolicy,
    state: StateVector,
    /// `live[p]` is the id held at position `p` of `state`.
    live: Vec<usize>,
    pending_fresh: BTreeSet<usize>,
    queue: Vec<Gate>,
    next_id: usize,
    retired: HashSet<usize>,
    peak_live: usize,
}

impl QuantumWorld {
    pub fn new(policy: FlushPolicy) -> Self {
        Self {
            policy,
            state: StateVector::new(vec![C64::new(1.0, 0.0)]).expect("unit scalar"),
            live: Vec::new(),
            pending_fresh: BTreeSet::new(),
            queue: Vec::new(),
            next_id: 0,
            retired: HashSet::new(),
            peak_live: 0,
        }
    }

    pub fn policy(&self) -> FlushPolicy {
        self.policy
    }

    /// Largest number of simultaneously simulated qubits so far.
    pub fn peak_live_qubits(&self) -> usize {
        self.peak_live
    }

    pub fn live_qubits(&self) -> &[usize] {
        &self.live
    }

    /// Adds qubits holding `psi`; its qubit `k` gets the `k`-th returned id.
    pub fn allocate_state(&mut self, psi: &StateVector) -> Vec<usize> {
        let ids: Vec<usize> = (0..psi.qubit_count()).map(|k| self.next_id + k).collect();
        self.next_id += ids.len();
        self.state = psi.tensor(&self.state);
        self.live.extend(&ids);
        self.peak_live = self.peak_live.max(self.live.len());
        ids
    }

    /// Adds `count` qubits in `|0⟩`.
    pub fn allocate_fresh(&mut self, count: usize) -> Vec<usize> {
        let ids: Vec<usize> = (self.next_id..self.next_id + count).collect();
        self.next_id += count;
        self.pending_fresh.extend(&ids);
        if self.policy == FlushPolicy::Eager {
            for &id in &ids {
                self.materialize(id);
            }
        }
        ids
    }

    fn check_id(&self, id: usize) -> Result<()> {
        if id >= self.next_id || self.retired.contains(&id) {
            return Err(Error::validation(format!("qubit {id} is not allocated")));
        }
        Ok(())
    }

    fn materialize(&mut self, id: usize) {
        if self.pending_fresh.remove(&id) {
            self.state = StateVector::zero(1).tensor(&self.state);
            self.live.push(id);
            self.peak_live = self.peak_live.max(self.live.len());
        }
    }

    fn position(&self, id: usize) -> usize {
        self.live.iter().position(|&q| q == id).expect("materialized qubit")
    }

    fn execute(&mut self, g: &Gate) {
        for q in g.qubits().collect::<Vec<_>>() {
            self.materialize(q);
        }
        let local = g.remap(|q| self.position(q));
        self.state
            .apply_matrix(&local.base_matrix(), local.targets(), local.controls());
    }

    /// Queues (or, when eager, runs) a gate on qubit ids.
    pub fn apply(&mut self, g: Gate) -> Result<()> {
        for q in g.qubits() {
            self.check_id(q)?;
        }
        match self.policy {
            FlushPolicy::Eager => self.execute(&g),
            FlushPolicy::Lazy => self.queue.push(g),
        }
        Ok(())
    }

    /// Runs every queued gate the given qubits depend on, leaving the rest
    /// queued. A skipped gate shares no qubit with any later executed gate,
    /// so it commutes past them.
    fn flush_for(&mut self, qubits: &[usize]) {
        let mut needed: HashSet<usize> = qubits.iter().copied().collect();
        let mut take = vec![false; self.queue.len()];
        for (k, g) in self.queue.iter().enumerate().rev() {
            if g.qubits().any(|q| needed.contains(&q)) {
                take[k] = true;
                needed.extend(g.qubits());
            }
        }
        let queue = std::mem::take(&mut self.queue);
        let mut rest = Vec::new();
        for (g, t) in queue.into_iter().zip(take) {
            if t {
                self.execute(&g);
            } else {
                rest.push(g);
            }
        }
        self.queue = rest;
        for &q in qubits {
            self.materialize(q);
        }
    }

    /// Measures and discards `qubits`; outcome bit `k` belongs to `qubits[k]`.
    /// With `forced`, projects onto that outcome instead of sampling.
    pub fn measure(
        &mut self,
        qubits: &[usize],
        rng: &mut SimRng,
        forced: Option<usize>,
    ) -> Result<(usize, f64)> {
        for &q in qubits {
            self.check_id(q)?;
        }
        self.flush_for(qubits);
        let pos: Vec<usize> = qubits.iter().map(|&q| self.position(q)).collect();
        let m = match forced {
            Some(outcome) => measure_forced(&self.state, &pos, outcome)?,
            None => measure_qubits(&self.state, &pos, rng)?,
        };
        self.state = m.collapsed.remove_qubits(&pos, m.outcome);
        self.live.retain(|q| !qubits.contains(q));
        self.retired.extend(qubits);
        Ok((m.outcome, m.probability))
    }

    /// The joint state of `qubits` (in that order), which must be all that is
    /// left in the simulation once their dependencies have run.
    pub fn state_of(&mut self, qubits: &[usize]) -> Result<StateVector> {
        for &q in qubits {
            self.check_id(q)?;
        }
        self.flush_for(qubits);
        if self.live.len() != qubits.len() {
            let others: Vec<usize> = self.live.iter().copied().filter(|q| !qubits.contains(q)).collect();
            return Err(Error::Invariant(format!(
                "qubits {others:?} are still entangled with the requested register"
            )));
        }
        let pos: Vec<usize> = qubits.iter().map(|&q| self.position(q)).collect();
        let mut amps = vec![C64::default(); self.state.dim()];
        for (i, a) in self.state.amplitudes().iter().enumerate() {
            let j = pos.iter().enumerate().fold(0, |acc, (k, &p)| acc | ((i >> p) & 1) << k);
            amps[j] = *a;
        }
        StateVector::new(amps)
    }

    pub fn pending_gates(&self) -> usize {
        self.queue.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::gates::*;
    use crate::quantum::{equal_up_to_phase, seeded_rng};

    #[test]
    fn lazy_and_eager_agree_on_teleport_chain() {
        for forced in 0..4usize {
            let mut results = Vec::new();
            for policy in [FlushPolicy::Lazy, FlushPolicy::Eager] {
                let mut w = QuantumWorld::new(policy);
                let psi = StateVector::from_real(&[0.6, 0.8]).unwrap();
                let data = w.allocate_state(&psi)[0];
                let mut pairs = Vec::new();
                for _ in 0..3 {
                    let p = w.allocate_fresh(2);
                    w.apply(h(p[0])).unwrap();
                    w.apply(cnot(p[0], p[1])).unwrap();
                    pairs.push(p);
                }
                for p in &pairs {
                    w.apply(t(data)).unwrap();
                    w.apply(swap(data, p[1])).unwrap();
                }
                let mut rng = seeded_rng(1);
                for p in &pairs {
                    w.apply(cnot(p[1], p[0])).unwrap();
                    w.apply(h(p[1])).unwrap();
                    w.measure(&[p[1], p[0]], &mut rng, Some(forced)).unwrap();
                }
                if policy == FlushPolicy::Lazy {
                    assert!(w.peak_live_qubits() <= 3);
                } else {
                    assert_eq!(w.peak_live_qubits(), 7);
                }
                results.push(w.state_of(&[data]).unwrap());
            }
            assert!(equal_up_to_phase(results[0].amplitudes(), results[1].amplitudes(), 1e-12));
        }
    }

    #[test]
    fn state_of_reorders_and_checks_leftovers() {
        let mut w = QuantumWorld::new(FlushPolicy::Lazy);
        let ids = w.allocate_state(&StateVector::basis(2, 0b01));
        w.apply(x(ids[1])).unwrap();
        let s = w.state_of(&[ids[1], ids[0]]).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b11));
        let extra = w.allocate_fresh(1);
        w.apply(cnot(ids[0], extra[0])).unwrap();
        assert!(w.state_of(&ids).is_err());
    }

    #[test]
    fn retired_qubits_rejected() {
        let mut w = QuantumWorld::new(FlushPolicy::Eager);
        let q = w.allocate_fresh(1);
        let mut rng = seeded_rng(0);
        assert_eq!(w.measure(&q, &mut rng, None).unwrap(), (0, 1.0));
        assert!(w.apply(x(q[0])).is_err());
        assert!(w.apply(x(99)).is_err());
    }
}
