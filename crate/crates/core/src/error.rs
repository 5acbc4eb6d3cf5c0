use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("post-selection impossible: branch probability {probability:.3e}")]
    PostSelectionImpossible { probability: f64 },

    #[error("unbound key symbol `{0}`")]
    UnboundSymbol(String),

    #[error("unsupported gate(s) for key tracking: {0}")]
    UnsupportedGate(String),

    #[error("ownership violation: {actor} touched qubit {qubit} owned by {owner}")]
    OwnershipViolation {
        actor: &'static str,
        qubit: usize,
        owner: &'static str,
    },

    #[error("one-time pad key #{0} was already used for encryption")]
    KeyReuse(u64),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Wraps an error with the protocol stage it came from.
    pub fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
