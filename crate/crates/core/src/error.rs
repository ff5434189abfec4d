use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("zero entry at ({row}, {col}) cannot be dephased")]
    ZeroEntry { row: usize, col: usize },

    #[error("vectors are not orthonormal (max deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("unknown family '{0}'")]
    UnknownFamily(String),

    #[error("family {family} takes {expected} parameter(s), got {found}")]
    WrongArity {
        family: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("parameter {value} of family {family} outside its domain {domain}")]
    ParameterOutOfRange {
        family: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("singular parameter point for {family}: {detail}")]
    SingularParameter { family: &'static str, detail: String },

    #[error("Möbius transform {transform} is singular at this point")]
    MobiusSingular { transform: &'static str },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("constraint list is empty")]
    EmptyConstraints,

    #[error("bases are not mutually unbiased (deviation {0:.3e})")]
    NotMutuallyUnbiased(f64),

    #[error("records were not produced by a grid sweep: {0}")]
    NonGrid(String),

    #[error("no proven symmetries are known for family {0}")]
    NoSymmetries(&'static str),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: line {line}: {message}")]
    Parse {
        context: String,
        line: usize,
        message: String,
    },
}

impl Error {
    /// True for errors caused by where a family was evaluated rather than by
    /// how the caller used the API.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularParameter { .. }
                | Error::MobiusSingular { .. }
                | Error::NonFinite
                | Error::ZeroEntry { .. }
                | Error::NotOrthonormal(_)
                | Error::NotMutuallyUnbiased(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
