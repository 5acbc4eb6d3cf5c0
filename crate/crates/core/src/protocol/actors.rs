use super::registry::{Actor, QubitRegistry, Role};
use super::transport::{
    check_non_interactive, CipherMessage, EvalTranscript, InProcessChannel, LoggedMessage, Message,
    Transport,
};
use super::world::FlushPolicy;
use crate::circuit::{gates, Circuit};
use crate::error::{Error, Result};
use crate::keys::{
    build_key_update_program, classify, keygen, qotp_decrypt_state, quasi_compactness_metrics,
    BellOutcome, Bindings, GadgetRecord, GateClass, KeyUpdateProgram, PauliKey, QuasiCompactness,
};
use crate::qpce::{covariance_density, encode_density, Dataset};
use crate::quantum::{derive_seed, seeded_rng, DensityMatrix, SimRng, StateVector};
use serde::Serialize;
use std::collections::HashSet;
use std::sync::{Mutex, OnceLock};

/// What the client starts from.
#[derive(Debug, Clone)]
pub enum ClientInput {
    State(StateVector),
    /// Encoded as the normalized `vec(ρ)`.
    Density(DensityMatrix),
    /// Standardized, turned into its covariance matrix, then encoded.
    Dataset(Dataset),
}

impl ClientInput {
    pub fn encode(&self) -> Result<StateVector> {
        match self {
            ClientInput::State(s) => Ok(s.clone()),
            ClientInput::Density(rho) => encode_density(rho),
            ClientInput::Dataset(d) => encode_density(&covariance_density(&d.standardize()?)?),
        }
    }
}

/// Client-side state between the protocol steps.
#[derive(Debug, Clone)]
pub struct ClientSession {
    pub registry: QubitRegistry,
    pub data: Vec<usize>,
    /// `(client_half, server_half)` of pair `i + 1`.
    pub pairs: Vec<(usize, usize)>,
    pub key: PauliKey,
}

/// Number of Bell pairs a circuit consumes.
pub fn required_pairs(c: &Circuit) -> Result<usize> {
    c.gates().iter().try_fold(0, |n, g| {
        Ok(n + usize::from(matches!(classify(g)?, GateClass::Gadget(_))))
    })
}

/// Encodes the input, creates `m_required` pairs in `|β₀₀⟩` and draws the key.
pub fn client_prepare(
    input: &ClientInput,
    m_required: usize,
    seed: u64,
    policy: FlushPolicy,
) -> Result<ClientSession> {
    let psi = input.encode()?;
    let mut registry = QubitRegistry::new(policy);
    let data = registry.allocate_state(Actor::Client, Role::Data, &psi);
    let mut pairs = Vec::with_capacity(m_required);
    for i in 1..=m_required {
        let (c, s) = registry.allocate_pair(Actor::Client, i);
        let rec = GadgetRecord::new(i, data[0], c, s)?;
        for g in rec.bell_pair_gates() {
            registry.apply(Actor::Client, g)?;
        }
        pairs.push((c, s));
    }
    let key = keygen(data.len(), seed)?;
    Ok(ClientSession {
        registry,
        data,
        pairs,
        key,
    })
}

fn used_keys() -> &'static Mutex<HashSet<u64>> {
    static USED: OnceLock<Mutex<HashSet<u64>>> = OnceLock::new();
    USED.get_or_init(Default::default)
}

/// Pads the data register and ships it, with the server halves, to the server.
pub fn client_encrypt(session: &mut ClientSession, circuit: &Circuit) -> Result<CipherMessage> {
    let key = &session.key;
    if key.qubit_count() != session.data.len() {
        return Err(Error::DimensionMismatch {
            expected: session.data.len(),
            found: key.qubit_count(),
        });
    }
    if !used_keys().lock().expect("key set lock").insert(key.serial) {
        return Err(Error::KeyReuse(key.serial));
    }
    for (k, &q) in session.data.iter().enumerate() {
        if key.b[k] == 1 {
            session.registry.apply(Actor::Client, gates::z(q))?;
        }
        if key.a[k] == 1 {
            session.registry.apply(Actor::Client, gates::x(q))?;
        }
    }
    let bell_halves: Vec<usize> = session.pairs.iter().map(|p| p.1).collect();
    let mut shipped = session.data.clone();
    shipped.extend(&bell_halves);
    session.registry.transfer(Actor::Client, Actor::Server, &shipped)?;
    Ok(CipherMessage {
        qubits: session.data.clone(),
        bell_halves,
        circuit: circuit.clone(),
    })
}

/// Applies the circuit to the ciphertext: Clifford gates directly, each
/// gadget gate followed by a swap into the next Bell half. Performs no
/// measurement.
pub fn server_evaluate(msg: &CipherMessage, registry: &mut QubitRegistry) -> Result<EvalTranscript> {
    let n = msg.qubits.len();
    let program = build_key_update_program(&msg.circuit, n)?;
    if program.gadgets.len() > msg.bell_halves.len() {
        return Err(Error::validation(format!(
            "circuit needs {} Bell pairs but only {} were supplied",
            program.gadgets.len(),
            msg.bell_halves.len()
        )));
    }
    let map = |q: usize| msg.qubits[q];
    let mut next = 0;
    for g in msg.circuit.gates() {
        match classify(g)? {
            GateClass::Clifford => registry.apply(Actor::Server, g.remap(map))?,
            GateClass::Gadget(kind) => {
                let omega = map(g.targets()[0]);
                let s = msg.bell_halves[next];
                next += 1;
                registry.apply(Actor::Server, kind.server_gate(omega))?;
                registry.apply(Actor::Server, gates::swap(omega, s))?;
            }
        }
    }
    let mut shipped = msg.qubits.clone();
    shipped.extend(&msg.bell_halves);
    registry.transfer(Actor::Server, Actor::Client, &shipped)?;
    Ok(EvalTranscript {
        result_qubits: msg.qubits.clone(),
        bell_halves: msg.bell_halves.clone(),
        program,
    })
}

/// What the client learns after measuring and decrypting.
#[derive(Debug, Clone, Serialize)]
pub struct Decryption {
    pub outcomes: Vec<BellOutcome>,
    pub final_key: PauliKey,
    /// Data register before decryption.
    pub raw_state: StateVector,
    pub decrypted_state: StateVector,
    /// Probability of the realized outcome sequence.
    pub branch_probability: f64,
}

/// Measures the gadgets in order, each in the basis picked by `h_i`, then
/// evaluates the final pad and removes it.
pub fn client_measure_and_decrypt(
    session: &mut ClientSession,
    transcript: &EvalTranscript,
    forced: Option<&[BellOutcome]>,
    rng: &mut SimRng,
) -> Result<Decryption> {
    let program = &transcript.program;
    program.check_causality()?;
    if let Some(f) = forced {
        if f.len() != program.gadgets.len() {
            return Err(Error::DimensionMismatch {
                expected: program.gadgets.len(),
                found: f.len(),
            });
        }
    }
    let key = session.key.clone();
    let mut bindings = Bindings::from_initial(&key.a, &key.b);
    let mut outcomes = Vec::with_capacity(program.gadgets.len());
    let mut branch_probability = 1.0;
    for (k, spec) in program.gadgets.iter().enumerate() {
        let (c, s) = session.pairs[k];
        let rec = GadgetRecord::new(spec.index, session.data[spec.data_qubit], c, s)?;
        let h = program.h_list[k].evaluate(&bindings)?;
        for g in rec.measurement_gates(spec.kind, h) {
            session.registry.apply(Actor::Client, g)?;
        }
        let want = forced.map(|f| f[k].measured_value());
        let (m, p) = session
            .registry
            .measure(Actor::Client, &rec.measured_qubits(), rng, want)?;
        let outcome = rec.outcome(m);
        bindings.bind_outcome(outcome.gadget_index, outcome.r_a, outcome.r_b);
        branch_probability *= p;
        outcomes.push(outcome);
    }
    for &(c, s) in &session.pairs[program.gadgets.len()..] {
        session.registry.measure(Actor::Client, &[c, s], rng, None)?;
    }
    let final_key = program.final_key(&bindings)?;
    let raw_state = session.registry.state_of(Actor::Client, &session.data)?;
    let decrypted_state = qotp_decrypt_state(&raw_state, &final_key)?;
    Ok(Decryption {
        outcomes,
        final_key,
        raw_state,
        decrypted_state,
        branch_probability,
    })
}

#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub circuit: Circuit,
    pub input: ClientInput,
    pub seed: u64,
    pub policy: FlushPolicy,
    /// Overrides the seeded key.
    pub key: Option<PauliKey>,
    /// Projects onto these gadget outcomes instead of sampling.
    pub forced_outcomes: Option<Vec<BellOutcome>>,
    /// Bell pairs to prepare; defaults to what the circuit needs.
    pub m_required: Option<usize>,
}

impl ProtocolConfig {
    pub fn new(circuit: Circuit, input: ClientInput, seed: u64) -> Self {
        Self {
            circuit,
            input,
            seed,
            policy: FlushPolicy::Lazy,
            key: None,
            forced_outcomes: None,
            m_required: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProtocolReport {
    pub initial_key: PauliKey,
    pub outcomes: Vec<BellOutcome>,
    pub final_key: PauliKey,
    pub raw_state: StateVector,
    pub decrypted_state: StateVector,
    pub branch_probability: f64,
    pub program: KeyUpdateProgram,
    pub metrics: QuasiCompactness,
    pub message_log: Vec<LoggedMessage>,
    pub peak_live_qubits: usize,
}

/// Runs prepare, encrypt, evaluate, measure and decrypt over an in-process
/// channel and checks the message log afterwards.
pub fn run_protocol(cfg: &ProtocolConfig) -> Result<ProtocolReport> {
    let m = match cfg.m_required {
        Some(m) => m,
        None => required_pairs(&cfg.circuit).map_err(|e| e.at_stage("client-prepare"))?,
    };
    let mut session = client_prepare(&cfg.input, m, derive_seed(cfg.seed, 0), cfg.policy)
        .map_err(|e| e.at_stage("client-prepare"))?;
    if let Some(k) = &cfg.key {
        session.key = k.clone();
    }
    let initial_key = session.key.clone();
    let mut channel = InProcessChannel::new();

    let msg = client_encrypt(&mut session, &cfg.circuit).map_err(|e| e.at_stage("client-encrypt"))?;
    channel.send(Actor::Client, Actor::Server, Message::Cipher(msg))?;

    let Message::Cipher(received) = channel.receive(Actor::Server)? else {
        return Err(Error::Invariant("server expected a cipher message".into()));
    };
    let transcript = server_evaluate(&received, &mut session.registry)
        .map_err(|e| e.at_stage("server-evaluate"))?;
    channel.send(Actor::Server, Actor::Client, Message::Transcript(transcript))?;

    let Message::Transcript(transcript) = channel.receive(Actor::Client)? else {
        return Err(Error::Invariant("client expected a transcript".into()));
    };
    let mut rng = seeded_rng(derive_seed(cfg.seed, 1));
    let dec = client_measure_and_decrypt(
        &mut session,
        &transcript,
        cfg.forced_outcomes.as_deref(),
        &mut rng,
    )
    .map_err(|e| e.at_stage("client-decrypt"))?;

    let message_log = channel.log().to_vec();
    check_non_interactive(&message_log)?;
    Ok(ProtocolReport {
        initial_key,
        outcomes: dec.outcomes,
        final_key: dec.final_key,
        raw_state: dec.raw_state,
        decrypted_state: dec.decrypted_state,
        branch_probability: dec.branch_probability,
        metrics: quasi_compactness_metrics(&transcript.program),
        program: transcript.program,
        message_log,
        peak_live_qubits: session.registry.world().peak_live_qubits(),
    })
}
