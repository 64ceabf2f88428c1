use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("(p, r) = ({p}, {r}) is outside the positive-definiteness region")]
    Region { p: String, r: String },

    #[error("pole of the gamma function at {0}")]
    Pole(f64),

    #[error("series operation needs a nonzero constant term")]
    ZeroConstantTerm,

    #[error("series operation needs a vanishing constant term")]
    NonzeroConstantTerm,

    #[error("series truncation orders differ ({0} vs {1})")]
    OrderMismatch(usize, usize),

    #[error("value has no exact rational representation: {0}")]
    Inexact(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("no negativity witness found within the search budget")]
    WitnessNotFound,

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("cannot parse {0:?} as a number")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
