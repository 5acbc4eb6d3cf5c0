use super::registry::Actor;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::keys::KeyUpdateProgram;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::io::Write;
use std::path::Path;

/// Client → server: the ciphertext register, the server halves of the Bell
/// pairs, and the circuit to evaluate. Carries no key material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CipherMessage {
    pub qubits: Vec<usize>,
    pub bell_halves: Vec<usize>,
    pub circuit: Circuit,
}

/// Server → client: the evaluated register, the Bell halves, and the
/// symbolic key-update program. Carries no measurement outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalTranscript {
    pub result_qubits: Vec<usize>,
    pub bell_halves: Vec<usize>,
    pub program: KeyUpdateProgram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "body", rename_all = "kebab-case")]
pub enum Message {
    Cipher(CipherMessage),
    Transcript(EvalTranscript),
}

impl Message {
    /// Qubit ids whose ownership travels with the message.
    pub fn quantum_payload(&self) -> Vec<usize> {
        match self {
            Message::Cipher(m) => m.qubits.iter().chain(&m.bell_halves).copied().collect(),
            Message::Transcript(t) => t.result_qubits.iter().chain(&t.bell_halves).copied().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoggedMessage {
    pub seq: usize,
    pub from: Actor,
    pub to: Actor,
    pub quantum_qubits: Vec<usize>,
    pub message: Message,
}

/// Ordered delivery between the two actors.
pub trait Transport {
    fn send(&mut self, from: Actor, to: Actor, message: Message) -> Result<()>;
    fn receive(&mut self, to: Actor) -> Result<Message>;
    fn log(&self) -> &[LoggedMessage];
}

/// In-process FIFO that records every message.
#[derive(Debug, Default)]
pub struct InProcessChannel {
    inbox: VecDeque<(Actor, Message)>,
    log: Vec<LoggedMessage>,
}

impl InProcessChannel {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Transport for InProcessChannel {
    fn send(&mut self, from: Actor, to: Actor, message: Message) -> Result<()> {
        if from == to {
            return Err(Error::validation("an actor cannot message itself"));
        }
        self.log.push(LoggedMessage {
            seq: self.log.len(),
            from,
            to,
            quantum_qubits: message.quantum_payload(),
            message: message.clone(),
        });
        self.inbox.push_back((to, message));
        Ok(())
    }

    fn receive(&mut self, to: Actor) -> Result<Message> {
        match self.inbox.front() {
            Some((dest, _)) if *dest == to => Ok(self.inbox.pop_front().expect("front exists").1),
            Some((dest, _)) => Err(Error::Invariant(format!(
                "next message is addressed to the {dest}, not the {to}"
            ))),
            None => Err(Error::Invariant(format!("no message waiting for the {to}"))),
        }
    }

    fn log(&self) -> &[LoggedMessage] {
        &self.log
    }
}

/// One JSON document per line.
pub fn write_trace(log: &[LoggedMessage], path: impl AsRef<Path>) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for m in log {
        serde_json::to_writer(&mut f, m)?;
        f.write_all(b"\n")?;
    }
    f.flush()?;
    Ok(())
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<Vec<LoggedMessage>> {
    std::fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

/// Strings that would reveal key material if they reached the server.
const KEY_MARKERS: [&str; 6] = ["a0[", "b0[", "ra(", "rb(", "\"const\"", "\"terms\""];

/// Non-interactivity scan: exactly one message each way, client first, and
/// nothing addressed to the server mentions key symbols.
pub fn check_non_interactive(log: &[LoggedMessage]) -> Result<()> {
    let quantum: Vec<&LoggedMessage> = log.iter().filter(|m| !m.quantum_qubits.is_empty()).collect();
    let shape: Vec<(Actor, Actor)> = quantum.iter().map(|m| (m.from, m.to)).collect();
    if shape != [(Actor::Client, Actor::Server), (Actor::Server, Actor::Client)] {
        return Err(Error::Invariant(format!(
            "expected one client→server then one server→client quantum message, got {shape:?}"
        )));
    }
    if log.iter().skip_while(|m| m.to != Actor::Server).skip(1).any(|m| m.to == Actor::Server) {
        return Err(Error::Invariant("server received a second message".into()));
    }
    for m in log.iter().filter(|m| m.to == Actor::Server) {
        let text = serde_json::to_string(&m.message)?;
        if let Some(marker) = KEY_MARKERS.iter().find(|k| text.contains(*k)) {
            return Err(Error::Invariant(format!(
                "message {} to the server contains key marker {marker}",
                m.seq
            )));
        }
    }
    Ok(())
}
