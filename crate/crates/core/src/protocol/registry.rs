use super::world::{FlushPolicy, QuantumWorld};
use crate::circuit::Gate;
use crate::error::{Error, Result};
use crate::quantum::{SimRng, StateVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Actor {
    Client,
    Server,
}

impl Actor {
    pub fn name(self) -> &'static str {
        match self {
            Actor::Client => "client",
            Actor::Server => "server",
        }
    }
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "role", content = "gadget")]
pub enum Role {
    Data,
    BellClientHalf(usize),
    BellServerHalf(usize),
    Ancilla,
}

/// The shared simulated state plus who may touch which qubit.
#[derive(Debug, Clone)]
pub struct QubitRegistry {
    world: QuantumWorld,
    owners: BTreeMap<usize, Actor>,
    roles: BTreeMap<usize, Role>,
}

impl QubitRegistry {
    pub fn new(policy: FlushPolicy) -> Self {
        Self {
            world: QuantumWorld::new(policy),
            owners: BTreeMap::new(),
            roles: BTreeMap::new(),
        }
    }

    pub fn world(&self) -> &QuantumWorld {
        &self.world
    }

    fn register(&mut self, ids: &[usize], owner: Actor, role: Role) {
        for &q in ids {
            self.owners.insert(q, owner);
            self.roles.insert(q, role);
        }
    }

    pub fn allocate_state(&mut self, owner: Actor, role: Role, psi: &StateVector) -> Vec<usize> {
        let ids = self.world.allocate_state(psi);
        self.register(&ids, owner, role);
        ids
    }

    /// Allocates the two halves of Bell pair `index` in `|00⟩` for `owner`;
    /// returns `(client_half, server_half)`.
    pub fn allocate_pair(&mut self, owner: Actor, index: usize) -> (usize, usize) {
        let ids = self.world.allocate_fresh(2);
        self.register(&ids[..1], owner, Role::BellClientHalf(index));
        self.register(&ids[1..], owner, Role::BellServerHalf(index));
        (ids[0], ids[1])
    }

    pub fn owner(&self, q: usize) -> Option<Actor> {
        self.owners.get(&q).copied()
    }

    pub fn role(&self, q: usize) -> Option<Role> {
        self.roles.get(&q).copied()
    }

    pub fn owned_by(&self, actor: Actor) -> Vec<usize> {
        self.owners
            .iter()
            .filter(|(_, &a)| a == actor)
            .map(|(&q, _)| q)
            .collect()
    }

    fn check(&self, actor: Actor, qubits: impl IntoIterator<Item = usize>) -> Result<()> {
        for q in qubits {
            match self.owner(q) {
                Some(a) if a == actor => {}
                Some(owner) => {
                    return Err(Error::OwnershipViolation {
                        actor: actor.name(),
                        qubit: q,
                        owner: owner.name(),
                    })
                }
                None => return Err(Error::validation(format!("qubit {q} is not registered"))),
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, actor: Actor, g: Gate) -> Result<()> {
        self.check(actor, g.qubits())?;
        self.world.apply(g)
    }

    /// Measures and releases `qubits`.
    pub fn measure(
        &mut self,
        actor: Actor,
        qubits: &[usize],
        rng: &mut SimRng,
        forced: Option<usize>,
    ) -> Result<(usize, f64)> {
        self.check(actor, qubits.iter().copied())?;
        let out = self.world.measure(qubits, rng, forced)?;
        for q in qubits {
            self.owners.remove(q);
        }
        Ok(out)
    }

    pub fn state_of(&mut self, actor: Actor, qubits: &[usize]) -> Result<StateVector> {
        self.check(actor, qubits.iter().copied())?;
        self.world.state_of(qubits)
    }

    /// Ownership moves with a quantum-bearing message.
    pub fn transfer(&mut self, from: Actor, to: Actor, qubits: &[usize]) -> Result<()> {
        self.check(from, qubits.iter().copied())?;
        for &q in qubits {
            self.owners.insert(q, to);
        }
        Ok(())
    }
}
