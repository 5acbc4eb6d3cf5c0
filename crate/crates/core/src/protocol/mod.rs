//! Client/server execution of homomorphic evaluation over a shared
//! simulated state.

mod actors;
mod registry;
mod transport;
mod world;

pub use actors::{
    client_encrypt, client_measure_and_decrypt, client_prepare, required_pairs, run_protocol,
    server_evaluate, ClientInput, ClientSession, Decryption, ProtocolConfig, ProtocolReport,
};
pub use registry::{Actor, QubitRegistry, Role};
pub use transport::{
    check_non_interactive, read_trace, write_trace, CipherMessage, EvalTranscript,
    InProcessChannel, LoggedMessage, Message, Transport,
};
pub use world::{FlushPolicy, QuantumWorld};
