//! Decision procedures and numerical probes for *eventual universality* of
//! finite qudit gate sets.
//!
//! A gate set Γ on `n` qudits of local dimension `d` may fail to generate a
//! dense subgroup of `SU(d^n)` yet become universal once its gates may be
//! applied to any `n` of `N > n` registers. This crate provides:
//!
//! * [`tensor`] — dense complex tensor algebra for qudit registers:
//!   Kronecker products, register permutations, lazily applied tensor-word
//!   operators, and fixed-subspace dimension computation with both a dense
//!   (stacked nullspace) and a matrix-free (averaged-operator subspace
//!   iteration) route.
//! * [`gateset`] — the gate-set JSON interchange format, determinant-1
//!   normalization, inverse closure, and generator families at register
//!   count `N`.
//! * [`moments`] — exact moments `M_{2k}` of the closure of a generator
//!   family (the Haar average of `|tr g|^{2k}`, computed as an invariant
//!   subspace dimension) and a seeded Monte-Carlo frame-potential estimator.
//! * [`universality`] — the decision engine: fourth-moment test, Clifford
//!   membership, finiteness probing, and the register-count bound at which
//!   the scan may stop.
//! * [`jeandel`] — controlled-involution gate families built from a
//!   universal two-qubit seed set, with compilation and invariant-subspace
//!   verification.
//! * [`diophantine`] — exhaustive bounded scans of the exponential
//!   Diophantine equations that govern the small-register exceptional cases.
//! * [`report`] — serializable analysis reports with content-addressed
//!   input digests.
//!
//! Everything stochastic (Monte-Carlo estimates, iterative eigensolver
//! starts) is driven by explicit seeds, so all results are reproducible.

pub mod diophantine;
mod error;
pub mod gateset;
pub mod jeandel;
pub mod moments;
pub mod report;
pub mod tensor;
pub mod universality;

pub use error::{Error, Result};

/// Size gates for dense materialization and matrix-free application.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest total dimension at which operators are materialized as dense
    /// matrices. Above it, fixed-subspace work switches to the matrix-free
    /// route and traces are evaluated column by column.
    pub dense_threshold: usize,
    /// Hard cap on the total dimension of any vector space the crate will
    /// touch, dense or not.
    pub max_total_dim: usize,
}

/// Environment variable consulted by [`Limits::from_env`] for the dense
/// threshold.
pub const DENSE_THRESHOLD_ENV: &str = "EVUNI_DENSE_THRESHOLD";

impl Default for Limits {
    fn default() -> Self {
        Limits {
            dense_threshold: 4096,
            max_total_dim: 1 << 21,
        }
    }
}

impl Limits {
    /// Default limits, with the dense threshold overridden by
    /// `EVUNI_DENSE_THRESHOLD` when that variable is set to a positive
    /// integer.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Ok(raw) = std::env::var(DENSE_THRESHOLD_ENV) {
            if let Ok(v) = raw.trim().parse::<usize>() {
                if v > 0 {
                    limits.dense_threshold = v;
                }
            }
        }
        limits
    }

    pub(crate) fn check_total_dim(&self, what: &str, dim: usize) -> Result<()> {
        if dim > self.max_total_dim {
            return Err(Error::ResourceLimit {
                what: what.to_string(),
                requested: dim,
                limit: self.max_total_dim,
            });
        }
        Ok(())
    }
}
