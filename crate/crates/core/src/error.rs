use thiserror::Error;

/// Errors raised by constructions and validators.
///
/// Failed *checks* are never errors: verifiers record them as report rows
/// with a witness. Errors are reserved for inputs a routine cannot act on.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("radius exceeded: no word of length <= {max_len} represents {target}")]
    RadiusExceeded { max_len: usize, target: String },

    #[error("range error: {0}")]
    Range(String),

    #[error("no left scheme: {0}")]
    NoScheme(String),

    #[error("unverified input: {0}")]
    Unverified(String),

    #[error("no Heisenberg direction: the commutator form vanishes")]
    Abelian,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
