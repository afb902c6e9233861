use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("closure exceeded cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("subset is not closed under multiplication: {0}")]
    NotClosed(String),
    #[error("not a group-mapping semigroup: {0}")]
    NotGM(String),
    #[error("semigroup is not inverse: {0}")]
    NotInverse(String),
    #[error("congruence classes are not a cross-section: {0}")]
    NotCrossSection(String),
    #[error("element is not G-invariant: {0}")]
    NotInvariant(String),
    #[error("lattice universes differ")]
    UniverseMismatch,
    #[error("partition is not a congruence: {0}")]
    NotACongruence(String),
    #[error("state universe exceeded bound {bound}")]
    UniverseOverflow { bound: usize },
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("generator outside the translational hull: {0}")]
    HullViolation(String),
    #[error("flow verification failed: {0}")]
    FlowVerificationFailed(String),
    #[error("slice condition violated: {0}")]
    SliceViolation(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("input error: {0}")]
    Input(String),
}
