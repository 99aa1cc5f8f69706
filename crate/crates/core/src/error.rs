//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("matrix is not symplectic: det = {det} != 1 (mod {modulus})")]
    NotSymplectic { det: u32, modulus: u32 },

    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u32, u32),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation requires odd prime dimension (got p = {0}): {1}")]
    OddPrimeOnly(u32, &'static str),

    #[error("not a valid state: {0}")]
    InvalidState(String),

    #[error("invalid facet vector: {0}")]
    InvalidFacet(String),

    #[error("eigenvalue {eigenvalue} is degenerate (multiplicity {multiplicity})")]
    DegenerateEigenspace { eigenvalue: f64, multiplicity: usize },

    #[error("construction check failed: {0}")]
    Construction(String),

    #[error("orthogonality backends disagree on {count} vertex pairs (first few: {first:?})")]
    BackendMismatch {
        count: usize,
        first: Vec<(usize, usize)>,
    },

    #[error("phase point u equals the facet r: only p^3 - p witness projectors take value 1 there and they do not certify an independent set; pick u != r")]
    PhasePointAtFacet,

    #[error("partition class {class} is not a clique: vertices {u} and {v} are not adjacent")]
    PartitionNotClique { class: usize, u: usize, v: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
