use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} = {value} is outside [{min}, {max}]")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("point projects onto the curve at several equidistant stations")]
    AmbiguousProjection,

    #[error("corridor at row {row} is narrower than twice the lateral margin")]
    InfeasibleCorridor { row: usize },

    #[error("insufficient perception: {0}")]
    InsufficientPerception(String),

    #[error("every lattice path is blocked by obstacles")]
    NoFeasiblePath,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
