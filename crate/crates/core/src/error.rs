use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid probability: {0}")]
    InvalidProbability(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("door {0} does not exist (doors are 1, 2 and 3)")]
    IllegalDoor(i64),
    #[error("conditioning on an event of probability zero")]
    ConditioningOnNull,
    #[error("the host opened the guest's door, there is no choice left")]
    NoChoiceAvailable,
    #[error("transcript archive is empty")]
    EmptyArchive,
    #[error("{action} is not allowed in phase {phase}")]
    PhaseViolation { phase: String, action: String },
    #[error("unknown session {0}")]
    UnknownSession(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
