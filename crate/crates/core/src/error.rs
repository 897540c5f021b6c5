use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid hypothesis class: {0}")]
    InvalidClass(String),
    #[error("context index {0} out of range")]
    UnknownContext(usize),
    #[error("unknown context id `{0}`")]
    UnknownContextId(String),
    #[error("follower type index {0} out of range")]
    UnknownType(usize),
    #[error("follower action index {0} out of range")]
    UnknownAction(usize),
    #[error("invalid mixed strategy: {0}")]
    InvalidStrategy(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("search cap exceeded: {0}")]
    CapExceeded(String),
    #[error("shattering search stopped at subset size {cap}; dimension is at least {lower_bound}")]
    ShatterCapped { lower_bound: usize, cap: usize },
    #[error("realizability violation{}: {detail}", round.map(|r| format!(" at round {r}")).unwrap_or_default())]
    NotRealizable { round: Option<usize>, detail: String },
    #[error("unsupported instance: {0}")]
    Unsupported(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
