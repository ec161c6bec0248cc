use thiserror::Error;

/// Errors raised by the polyhedral and network routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(String),

    #[error("cap exceeded: {what} is {value}, limit {limit}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("direction vector must be nonzero")]
    ZeroDirection,

    #[error("operation undefined for a {0}-dimensional polytope")]
    Degenerate(usize),

    #[error("not an affine product: dim(P+Q) = {sum} but dim P + dim Q = {expected}")]
    NotAffineProduct { sum: usize, expected: usize },

    #[error("not a join: dim conv(P u Q) = {hull} but dim P + dim Q + 1 = {expected}")]
    NotJoin { hull: usize, expected: usize },

    #[error("inexact division: {numerator} / {denominator}")]
    InexactDivision {
        numerator: String,
        denominator: String,
    },

    #[error("no generic lift found after {retries} retries")]
    GenericityFailure { retries: u32 },

    #[error("bias-free contract violated: {0}")]
    BiasPresent(String),

    #[error("malformed network: {0}")]
    MalformedNetwork(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
