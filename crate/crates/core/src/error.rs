use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unknown building element `{0}`")]
    UnknownElement(String),
    #[error("unknown burrow `{0}`")]
    UnknownBurrow(String),
    #[error("socle check failed: {0}")]
    Socle(String),
    #[error("relation check failed: {0}")]
    Relation(String),
    #[error("rewrite step cap of {cap} exceeded while reducing {monomial}")]
    RewriteCap { cap: usize, monomial: String },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::Dimension(_)
            | Error::Invalid(_)
            | Error::UnknownElement(_)
            | Error::UnknownBurrow(_)
            | Error::Socle(_)
            | Error::Io(_)
            | Error::Json(_) => 1,
            Error::Relation(_) | Error::RewriteCap { .. } => 2,
            Error::Invariant(_) => 3,
        }
    }
}
