use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid label: {0}")]
    InvalidLabel(String),

    #[error("invalid poset: {0}")]
    InvalidPoset(String),

    #[error("poset is not series-parallel (N-pattern at nodes {0:?})")]
    NotSeriesParallel([usize; 4]),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("term contains a star; use bounded semantics")]
    ContainsStar,

    #[error("term contains an observation; reify it first")]
    ContainsObs,

    #[error("hypothesis file line {line}: {message}")]
    HypothesisFile { line: usize, message: String },

    #[error("unknown hypothesis pack `{0}`")]
    UnknownPack(String),

    #[error("observation `{0}` is not in the configured observation set")]
    UnknownObservation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
