use thiserror::Error;

/// Errors surfaced by the engine. Callers that need process exit codes map
/// `InvalidInput`-style failures to 2 and `Capacity` to 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("capacity exceeded: {what} needs {needed} cells, limit is {limit}")]
    Capacity {
        what: String,
        needed: u64,
        limit: u64,
    },

    #[error("action is not regular: {0}; subdivide the complex (barycentric_subdivide) and lift the action, then retry")]
    NonRegularAction(String),

    #[error("action is not free: {0}; integral configuration homology requires a free regular action")]
    NonFreeAction(String),

    #[error("complex is not closed: {0}")]
    NotClosed(String),

    #[error("top homology is not one dimensional: {0}")]
    NotOrientable(String),

    #[error("character is not multiplicative: {0}")]
    BadCharacter(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
