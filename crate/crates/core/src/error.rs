use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input {0} is not part of the input alphabet")]
    InputNotFound(i64),

    #[error("output {output} is not in the overlap of the supports of {x} and {x_prime}")]
    OutsideOverlap { x: i64, x_prime: i64, output: i64 },

    #[error("support size must be odd and at least 1, got {0}")]
    EvenSupportSize(u64),

    #[error("invalid kernel parameter: {0}")]
    InvalidKernel(String),

    #[error("invalid mechanism spec: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("probability vector does not sum to 1 (sum = {0})")]
    NotNormalized(f64),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("overlap threshold is undefined at separation 0")]
    ZeroSeparation,

    #[error("failed to parse mechanism spec: {0}")]
    Parse(String),
}
