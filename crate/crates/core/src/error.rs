use thiserror::Error;

/// Errors produced by the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported matrix dimension {0} (only 2 and 4 are allowed)")]
    UnsupportedDimension(usize),

    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {got}")]
    EntryCount { dim: usize, expected: usize, got: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (max |a - a^dagger| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("visibility p = {0} outside [-1/3, 1]: Werner state would not be positive")]
    VisibilityOutOfRange(f64),

    #[error("vector norm {norm} is not within 1e-9 of 1")]
    NotUnitVector { norm: f64 },

    #[error("polar angles out of range: theta = {theta}, phi = {phi}")]
    AngleOutOfRange { theta: f64, phi: f64 },

    #[error("Born-rule trace has imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },

    #[error("invalid hidden-variable model: {0}")]
    InvalidModel(String),

    #[error("hidden-variable index {index} out of range (model has {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("correlator {0} outside [-1, 1]")]
    CorrelatorOutOfRange(f64),

    #[error("state has non-vanishing single-party marginals (max |<X>| = {0:e})")]
    NonVanishingMarginals(f64),

    #[error("number of trials must be at least 1")]
    NoTrials,

    #[error("malformed trial log line {line}: {reason}")]
    TrialLog { line: usize, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
