use thiserror::Error;

/// Errors produced by gate-set loading, tensor algebra, and the decision
/// engine.
///
/// `Inconclusive` is deliberately a first-class variant rather than a panic
/// or a silent default: numerical routines that cannot certify their answer
/// (ambiguous spectral gaps, iteration budgets exhausted, probe caps hit)
/// report it, and the CLI maps it to a distinct exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to parse gate-set JSON: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("gate `{label}`: expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    DimensionMismatch {
        label: String,
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("gate `{label}` is not unitary: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NonUnitary {
        label: String,
        defect: f64,
        tol: f64,
    },

    #[error("gate `{label}` is not an involution up to phase: defect {defect:.3e}")]
    NonInvolution { label: String, defect: f64 },

    #[error("invalid gate-set header: {0}")]
    InvalidHeader(String),

    #[error("invalid targets: {0}")]
    InvalidTargets(String),

    #[error("{what} needs {requested} but the configured limit is {limit}")]
    ResourceLimit {
        what: String,
        requested: usize,
        limit: usize,
    },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("unsupported regime: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for outcomes that mean "could not certify an answer" rather
    /// than "the input or request is defective".
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Error::Inconclusive(_))
    }
}
