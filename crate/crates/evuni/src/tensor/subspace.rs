//! Dimension of the simultaneous fixed subspace `∩_i ker(op_i − I)` of a
//! family of unitary tensor-word operators.
//!
//! Two deliberately different routes are provided and cross-checked in the
//! test suite:
//!
//! * **Dense** — materialize every operator, stack the blocks `op_i − I`
//!   vertically, and count near-zero singular values of the stack. The
//!   nullspace of the stack is exactly the simultaneous fixed subspace (for
//!   unitary `U`, `Uv = v ⟺ U†v = v`, so no inverse closure is needed).
//! * **MatrixFree** — subspace iteration on the averaged operator
//!   `A = mean(op_i, op_i†)`. `A` is Hermitian with spectrum in `[-1, 1]`,
//!   and `Av = v` holds iff `v` is fixed by every operator (equality in the
//!   triangle inequality forces all the unit-norm images to coincide).
//!   Iteration runs on `I + A` so that eigenvalue `-1` cannot masquerade as
//!   a slowly oscillating fixed direction, and the unit-eigenvalue count is
//!   only trusted once it has survived a doubling of the iteration budget.
//!
//! Both routes refuse to guess: ambiguous spectra (singular values or Ritz
//! values inside the tolerance band between "zero" and "clearly nonzero")
//! produce [`Error::Inconclusive`] instead of a number. The matrix-free
//! route resolves near-fixed directions only down to phase deviations of
//! order `sqrt(2·eigen_tolerance)`; generators of group closures have
//! quantized eigenphases and stay well clear of the band.

use ndarray::prelude::*;
use ndarray_linalg::{Eigh, SVD, UPLO};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use super::{CMat, TensorWordOperator};
use crate::{Error, Limits, Result};

/// Eigenvalues of the averaged operator within this distance of 1 count as
/// fixed directions.
pub const DEFAULT_EIGEN_TOLERANCE: f64 = 1e-8;

/// The first excluded eigenvalue (or singular value, for the dense route)
/// must sit at least this far from the counted region, otherwise the
/// computation reports `Inconclusive`.
pub const DEFAULT_GAP_FLOOR: f64 = 1e-4;

/// Upper bound on the bytes the dense route may spend on the stacked
/// matrix.
const STACK_BYTES_BUDGET: usize = 768 << 20;

/// Maximum drift of the largest excluded Ritz value over the stability
/// window before a candidate count is trusted. See the window comment in
/// [`matrix_free_route`] for the safety margin this leaves.
const RITZ_STALL_TOL: f64 = 1e-7;

/// How the fixed-subspace dimension is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedSubspaceMethod {
    /// Stack `op_i − I` densely and count near-zero singular values.
    Dense,
    /// Subspace iteration on the averaged operator; never materializes a
    /// full matrix.
    MatrixFree,
}

/// Tuning knobs for [`fixed_subspace_dimension`].
#[derive(Debug, Clone)]
pub struct SubspaceOptions {
    /// Distance from 1 within which an eigenvalue counts as fixed.
    pub eigen_tolerance: f64,
    /// Minimum separation demanded between counted and excluded spectrum.
    pub gap_floor: f64,
    /// Ritz residual bound for trusting a counted eigenpair.
    pub residual_tolerance: f64,
    /// Seed for the random starting block.
    pub seed: u64,
    /// Starting block width.
    pub initial_block: usize,
    /// The block grows (doubling) up to this width when the whole block
    /// converges to eigenvalue 1; beyond it the computation gives up.
    pub max_block: usize,
    /// Iterations between Ritz checks.
    pub check_every: usize,
    /// Total iteration budget before reporting non-convergence.
    pub max_iterations: usize,
}

impl Default for SubspaceOptions {
    fn default() -> Self {
        SubspaceOptions {
            eigen_tolerance: DEFAULT_EIGEN_TOLERANCE,
            gap_floor: DEFAULT_GAP_FLOOR,
            residual_tolerance: 1e-7,
            seed: 7,
            initial_block: 8,
            max_block: 96,
            check_every: 24,
            max_iterations: 12_288,
        }
    }
}

/// Dimension of `∩_i ker(op_i − I)` for unitary operators on a common
/// space of dimension `dim`.
///
/// With an empty operator list every vector is fixed and the answer is
/// `dim`.
pub fn fixed_subspace_dimension(
    ops: &[TensorWordOperator],
    dim: usize,
    method: FixedSubspaceMethod,
    limits: &Limits,
    opts: &SubspaceOptions,
) -> Result<usize> {
    limits.check_total_dim("fixed subspace", dim)?;
    for op in ops {
        if op.dim()? != dim {
            return Err(Error::InvalidTargets(format!(
                "operator dimension {} does not match expected {dim}",
                op.dim()?
            )));
        }
    }
    if ops.is_empty() {
        return Ok(dim);
    }
    match method {
        FixedSubspaceMethod::Dense => dense_route(ops, dim, limits, opts),
        FixedSubspaceMethod::MatrixFree => matrix_free_route(ops, dim, opts),
    }
}

fn dense_route(
    ops: &[TensorWordOperator],
    dim: usize,
    limits: &Limits,
    opts: &SubspaceOptions,
) -> Result<usize> {
    if dim > limits.dense_threshold {
        return Err(Error::ResourceLimit {
            what: "dense fixed-subspace route".to_string(),
            requested: dim,
            limit: limits.dense_threshold,
        });
    }
    let rows = ops.len() * dim;
    let bytes = rows
        .checked_mul(dim)
        .and_then(|n| n.checked_mul(16))
        .unwrap_or(usize::MAX);
    if bytes > STACK_BYTES_BUDGET {
        return Err(Error::ResourceLimit {
            what: "dense fixed-subspace stack (bytes)".to_string(),
            requested: bytes,
            limit: STACK_BYTES_BUDGET,
        });
    }

    let mut stack = CMat::zeros((rows, dim));
    for (i, op) in ops.iter().enumerate() {
        let dense = op.to_dense(limits)?;
        let mut block = stack.slice_mut(s![i * dim..(i + 1) * dim, ..]);
        block.assign(&dense);
        for j in 0..dim {
            block[(j, j)] -= C64::new(1.0, 0.0);
        }
    }

    let (_, sigma, _) = stack
        .svd(false, false)
        .map_err(|e| Error::Inconclusive(format!("singular value decomposition failed: {e}")))?;
    let sigma_max = sigma.iter().cloned().fold(0.0_f64, f64::max);
    let scale = sigma_max.max(1.0);
    let null_tol = 1e-7 * scale;
    let band_hi = opts.gap_floor * scale;

    let nullity = sigma.iter().filter(|&&s| s < null_tol).count();
    if let Some(&smallest_kept) = sigma
        .iter()
        .filter(|&&s| s >= null_tol)
        .reduce(|a, b| if a < b { a } else { b })
    {
        if smallest_kept < band_hi {
            return Err(Error::Inconclusive(format!(
                "singular value {smallest_kept:.3e} falls between the null cutoff \
                 {null_tol:.3e} and the separation floor {band_hi:.3e}"
            )));
        }
    }
    Ok(nullity)
}

/// One application of `A = mean(op_i, op_i†)` to a vector.
struct AveragedOperator {
    gens: Vec<TensorWordOperator>,
}

impl AveragedOperator {
    fn new(ops: &[TensorWordOperator]) -> Self {
        let mut gens: Vec<TensorWordOperator> = ops.to_vec();
        gens.extend(ops.iter().map(TensorWordOperator::adjoint));
        AveragedOperator { gens }
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut acc = vec![C64::new(0.0, 0.0); x.len()];
        for g in &self.gens {
            let y = g.apply(x);
            for (a, v) in acc.iter_mut().zip(y) {
                *a += v;
            }
        }
        let scale = 1.0 / self.gens.len() as f64;
        for a in &mut acc {
            *a *= scale;
        }
        acc
    }
}

fn matrix_free_route(
    ops: &[TensorWordOperator],
    dim: usize,
    opts: &SubspaceOptions,
) -> Result<usize> {
    let avg = AveragedOperator::new(ops);
    let mut rng = ChaCha12Rng::seed_from_u64(opts.seed);
    let mut block: Vec<Vec<C64>> = Vec::new();
    let mut width = opts.initial_block.clamp(1, dim.min(opts.max_block));
    grow_block(&mut block, width, dim, &mut rng);
    orthonormalize(&mut block, &mut rng);

    let mut total = 0usize;
    // A candidate count, the iteration at which it was first seen, and the
    // largest excluded Ritz value at that moment. The count is only
    // returned after four further checks during which neither the count
    // nor the excluded value moved: a block that is still converging shows
    // a stable (under-)count while its top excluded value creeps toward an
    // eigenvalue it has not reached yet. Quantitatively, a Ritz value
    // heading for a fixed direction from below the gap floor closes at
    // least a fraction 1 − r^W of its remaining distance (≥ 1e−4) over a
    // W-iteration window at contraction ratio r = (1 + λ₂)/2 ≤ 1 − 1e−4/2,
    // which is > 1e−6 for the default W = 96 — ten times the stall
    // tolerance — so a stalled value cannot be en route to 1.
    let mut candidate: Option<(usize, usize, f64)> = None;

    while total < opts.max_iterations {
        for _ in 0..opts.check_every {
            // Power step on I + A (spectrum [0, 2], fixed directions at 2),
            // so eigenvalue -1 of A decays instead of oscillating.
            for col in block.iter_mut() {
                let ax = avg.apply(col);
                for (c, a) in col.iter_mut().zip(ax) {
                    *c += a;
                }
            }
            orthonormalize(&mut block, &mut rng);
        }
        total += opts.check_every;

        // Rayleigh-Ritz on the current block.
        let images: Vec<Vec<C64>> = block.iter().map(|col| avg.apply(col)).collect();
        let b = block.len();
        let mut h = CMat::zeros((b, b));
        for i in 0..b {
            for j in 0..b {
                h[(i, j)] = dot(&block[i], &images[j]);
            }
        }
        let (vals, vecs) = h
            .eigh(UPLO::Lower)
            .map_err(|e| Error::Inconclusive(format!("Ritz eigensolve failed: {e}")))?;
        // Ascending order; inspect from the top.
        let count = vals
            .iter()
            .filter(|&&v| v >= 1.0 - opts.eigen_tolerance)
            .count();

        if count == b && b < dim.min(opts.max_block) {
            // The whole block looks fixed; widen it so a non-fixed
            // direction becomes visible.
            width = (2 * width).min(dim.min(opts.max_block));
            grow_block(&mut block, width, dim, &mut rng);
            orthonormalize(&mut block, &mut rng);
            candidate = None;
            continue;
        }

        let gap_ok = if count == b {
            b == dim
        } else {
            vals[b - 1 - count] <= 1.0 - opts.gap_floor
        };
        let residuals_ok = (0..count).all(|i| {
            let w = vecs.column(b - 1 - i).to_vec();
            let theta = vals[b - 1 - i];
            // Depending on how the backend maps the row-major buffer into
            // LAPACK's column-major layout, the returned columns can be
            // eigenvectors of the transpose, i.e. conjugates of the true
            // ones. A small residual is a valid certificate either way, so
            // accept whichever variant passes.
            let direct = ritz_residual(&block, &images, &w, theta);
            let conjugated: Vec<C64> = w.iter().map(|z| z.conj()).collect();
            let flipped = ritz_residual(&block, &images, &conjugated, theta);
            direct.min(flipped) <= opts.residual_tolerance
        });

        // The value every exclusion rests on; when the whole block is
        // counted there is nothing excluded and nothing to watch.
        let theta_exc = if count < b {
            vals[b - 1 - count]
        } else {
            f64::NEG_INFINITY
        };

        if gap_ok && residuals_ok {
            match candidate {
                Some((c, since, theta0))
                    if c == count
                        && (theta_exc == theta0
                            || (theta_exc - theta0).abs() <= RITZ_STALL_TOL) =>
                {
                    if total >= since + 4 * opts.check_every {
                        return Ok(count);
                    }
                }
                _ => candidate = Some((count, total, theta_exc)),
            }
        } else {
            candidate = None;
        }
    }

    Err(Error::Inconclusive(format!(
        "matrix-free fixed-subspace count did not stabilize within {} iterations \
         (dimension {dim}, block {})",
        opts.max_iterations,
        block.len()
    )))
}

fn random_column(dim: usize, rng: &mut ChaCha12Rng) -> Vec<C64> {
    (0..dim)
        .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect()
}

fn grow_block(block: &mut Vec<Vec<C64>>, width: usize, dim: usize, rng: &mut ChaCha12Rng) {
    while block.len() < width {
        block.push(random_column(dim, rng));
    }
}

/// Modified Gram-Schmidt with a second projection pass per column.
///
/// A column whose norm collapses under projection lies numerically inside
/// the span of the earlier columns and carries no direction of its own. This
/// happens persistently, not just transiently: a power step on `I + A`
/// annihilates eigenvalue `-1` components of `A` exactly when the matrix
/// entries are exact, and the rounding lint left behind can be trapped in an
/// invariant symmetry class, so renormalizing the lint never restores rank.
/// Such a column is replaced with a fresh random vector instead, which
/// generically re-populates the lost directions.
fn orthonormalize(block: &mut [Vec<C64>], rng: &mut ChaCha12Rng) {
    for i in 0..block.len() {
        let mut replacements = 0;
        loop {
            let entry_norm = column_norm(&block[i]);
            for _ in 0..2 {
                for j in 0..i {
                    let (head, tail) = block.split_at_mut(i);
                    let proj = dot(&head[j], &tail[0]);
                    for (t, h) in tail[0].iter_mut().zip(&head[j]) {
                        *t -= proj * h;
                    }
                }
            }
            let norm = column_norm(&block[i]);
            if norm > 1e-8 * entry_norm.max(1.0) || replacements >= 4 {
                if norm > 0.0 {
                    let inv = 1.0 / norm;
                    for z in &mut block[i] {
                        *z *= inv;
                    }
                }
                break;
            }
            let dim = block[i].len();
            block[i] = random_column(dim, rng);
            replacements += 1;
        }
    }
}

fn column_norm(col: &[C64]) -> f64 {
    col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `‖A v − θ v‖` for the Ritz pair assembled from block coordinates `w`.
fn ritz_residual(block: &[Vec<C64>], images: &[Vec<C64>], w: &[C64], theta: f64) -> f64 {
    let dim = block[0].len();
    let mut resid = vec![C64::new(0.0, 0.0); dim];
    for (j, &wj) in w.iter().enumerate() {
        for i in 0..dim {
            resid[i] += wj * (images[j][i] - theta * block[j][i]);
        }
    }
    resid.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
