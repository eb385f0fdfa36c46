use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a permutation of 1..{n}: {seq:?}")]
    NotAPermutation { n: usize, seq: Vec<u32> },

    #[error("need at least {min} points, got {n}")]
    TooFewPoints { n: usize, min: usize },

    #[error("configuration {0} is not convergent")]
    NotConvergent(String),

    #[error("not multipliable: {0}")]
    NotMultipliable(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precision failure: error bound {bound:e} exceeds half the rounding spacing")]
    Precision { bound: f64 },

    #[error("need at least {need} terms, got {have}")]
    InsufficientTerms { have: usize, need: usize },

    #[error("linear form model: {0}")]
    Model(String),

    #[error("unknown {kind} `{name}`")]
    UnknownStrategy { kind: &'static str, name: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
