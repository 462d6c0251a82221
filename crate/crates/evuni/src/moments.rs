//! Spectral moments of generator families.
//!
//! The `2k`-th moment of a family `{g_i}` on `U(m)` is the Haar average of
//! `|tr g|^{2k}` over the closure of the family. It equals the dimension of
//! the common fixed subspace of the lifted operators `(g_i ⊗ ḡ_i)^{⊗k}`,
//! because a vector fixed by every generator is fixed by the whole closure.
//! [`exact_moment`] computes that dimension exactly (it is an integer);
//! [`frame_potential_mc`] estimates the related word-averaged frame
//! potential by sampling random words, which scales to registers far beyond
//! dense reach.
//!
//! Reference values: a family is a 2-design exactly when its 4th moment is
//! 2, the Haar value on `SU(m)` for every `m ≥ 2`. The 8th Haar moment is
//! `4! = 24` once `m ≥ 5` (below that, extra invariants built from the
//! Levi-Civita tensor inflate the count; on `SU(2)` the value is the
//! Catalan number 14).

use ndarray_linalg::QR;
use num_complex::Complex64 as C64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gateset::GeneratorFamily;
use crate::tensor::{
    checked_power, fixed_subspace_dimension, CMat, FixedSubspaceMethod, SubspaceOptions,
    TensorWordOperator,
};
use crate::{Error, Limits, Result};

/// Number of independent sample streams merged into one estimate. Fixed so
/// results are identical regardless of how many threads execute them.
const STREAMS: u64 = 16;

/// How a moment value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentMethod {
    /// Dense nullspace of the stacked lifted generators.
    Dense,
    /// Matrix-free subspace iteration on the averaged lifted generator.
    MatrixFree,
    /// Monte Carlo frame-potential estimate over random words.
    MonteCarlo,
}

/// A Monte Carlo estimate with a jackknife standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: u64,
    pub word_length: u32,
    pub seed: u64,
}

/// Result of a moment computation or estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentReport {
    /// Number of registers the family acts on.
    pub register_count: u32,
    /// Half-order: the report concerns the `2k`-th moment `|tr|^{2k}`.
    pub k: u32,
    /// Dimension of the lifted space `d^(2kN)`, when it fits in a `u64`.
    pub moment_dim: Option<u64>,
    /// Exact moment (a fixed-subspace dimension), when computed.
    pub exact: Option<u64>,
    /// Monte Carlo estimate, when sampled.
    pub estimate: Option<McEstimate>,
    pub method: MomentMethod,
}

impl MomentReport {
    /// The moment as a float, preferring the exact value.
    pub fn value(&self) -> f64 {
        self.exact
            .map(|v| v as f64)
            .or_else(|| self.estimate.as_ref().map(|e| e.value))
            .unwrap_or(f64::NAN)
    }
}

/// Compute the `2k`-th moment of `fam` exactly as a fixed-subspace
/// dimension, choosing the dense route when it fits and falling back to the
/// matrix-free route otherwise.
pub fn exact_moment(fam: &GeneratorFamily, k: u32, limits: &Limits) -> Result<MomentReport> {
    exact_moment_with(fam, k, limits, &SubspaceOptions::default())
}

/// [`exact_moment`] with explicit subspace-iteration options.
pub fn exact_moment_with(
    fam: &GeneratorFamily,
    k: u32,
    limits: &Limits,
    opts: &SubspaceOptions,
) -> Result<MomentReport> {
    if k == 0 {
        return Err(Error::Unsupported(
            "moment order k must be at least 1".into(),
        ));
    }
    let d = fam.base.d() as usize;
    let sites = 2 * k as usize * fam.register_count as usize;
    let dim = checked_power(d, sites)?;
    limits.check_total_dim("lifted moment space", dim)?;
    let lifted: Vec<TensorWordOperator> = fam
        .members
        .iter()
        .map(|m| m.moment_lift(k as usize))
        .collect();

    let (value, method) =
        match fixed_subspace_dimension(&lifted, dim, FixedSubspaceMethod::Dense, limits, opts) {
            Ok(v) => (v, MomentMethod::Dense),
            Err(Error::ResourceLimit { .. }) => (
                fixed_subspace_dimension(
                    &lifted,
                    dim,
                    FixedSubspaceMethod::MatrixFree,
                    limits,
                    opts,
                )?,
                MomentMethod::MatrixFree,
            ),
            Err(e) => return Err(e),
        };
    Ok(MomentReport {
        register_count: fam.register_count,
        k,
        moment_dim: Some(dim as u64),
        exact: Some(value as u64),
        estimate: None,
        method,
    })
}

/// Monte Carlo sampling parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McOptions {
    /// Number of lazy steps per sampled word; each step applies a uniformly
    /// chosen generator or skips.
    pub word_length: u32,
    /// Number of sampled words.
    pub samples: u64,
    /// Base seed; the full estimate is a deterministic function of it.
    pub seed: u64,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            word_length: 200,
            samples: 100_000,
            seed: 7,
        }
    }
}

/// Estimate the `2k`-th moment by averaging `|tr w|^{2k}` over random words
/// `w` in the generators and their adjoints.
///
/// Each word is built by `word_length` *lazy* steps: a step either applies
/// a uniformly chosen generator or, with the same probability as any single
/// generator, applies nothing. Laziness matters for correctness, not just
/// mixing speed: when the closure carries a grading (a homomorphism onto
/// `Z_m` sending every generator to `1`, e.g. the parity grading of
/// `⟨CZ, SWAP⟩`), words of one fixed length sample a single coset and the
/// average converges to that coset's moment instead of the group's. The
/// identity step breaks every such grading, so the word distribution
/// converges to the uniform (Haar) measure on the whole closure.
///
/// For dense closures the limit is the Haar moment; for finite closures it
/// is the exact group average. The standard error is the jackknife estimate
/// for the mean.
pub fn frame_potential_mc(
    fam: &GeneratorFamily,
    k: u32,
    opts: &McOptions,
    limits: &Limits,
) -> Result<MomentReport> {
    if k == 0 {
        return Err(Error::Unsupported(
            "moment order k must be at least 1".into(),
        ));
    }
    if opts.samples == 0 || opts.word_length == 0 {
        return Err(Error::Unsupported(
            "Monte Carlo estimation needs at least one sample and a positive word length".into(),
        ));
    }
    let dim = fam.dim()?;
    limits.check_total_dim("sampled register space", dim)?;

    let values = if dim <= limits.dense_threshold {
        sample_dense(fam, k, opts, dim, limits)?
    } else {
        sample_matrix_free(fam, k, opts, dim)?
    };

    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    // Jackknife standard error of the mean. The leave-one-out estimator
    // collapses to the closed form sqrt(Σ (x_i − x̄)² / (n(n−1))).
    let std_err = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n * (n - 1.0))).sqrt()
    };

    let d = fam.base.d() as usize;
    let moment_dim = checked_power(d, 2 * k as usize * fam.register_count as usize)
        .ok()
        .map(|v| v as u64);
    Ok(MomentReport {
        register_count: fam.register_count,
        k,
        moment_dim,
        exact: None,
        estimate: Some(McEstimate {
            value: mean,
            std_err,
            samples: opts.samples,
            word_length: opts.word_length,
            seed: opts.seed,
        }),
        method: MomentMethod::MonteCarlo,
    })
}

/// Per-stream seeds and sample counts for a deterministic merge.
fn stream_plan(opts: &McOptions) -> Vec<(u64, u64)> {
    let mut seeder = ChaCha12Rng::seed_from_u64(opts.seed);
    (0..STREAMS)
        .map(|s| {
            let seed = seeder.gen::<u64>();
            let count = opts.samples / STREAMS + u64::from(s < opts.samples % STREAMS);
            (seed, count)
        })
        .collect()
}

fn sample_dense(
    fam: &GeneratorFamily,
    k: u32,
    opts: &McOptions,
    dim: usize,
    limits: &Limits,
) -> Result<Vec<f64>> {
    // Flatten generators and their adjoints to row-major buffers, dropping
    // duplicates so self-adjoint members are not double-weighted.
    let mut gens: Vec<Vec<C64>> = Vec::new();
    for member in &fam.members {
        for op in [member.clone(), member.adjoint()] {
            let dense = op.to_dense(limits)?;
            let flat: Vec<C64> = dense.iter().copied().collect();
            let dup = gens
                .iter()
                .any(|g| matrix_buf_distance(g, &flat) <= 1e-10);
            if !dup {
                gens.push(flat);
            }
        }
    }

    let exponent = 2 * k as i32;
    let plan = stream_plan(opts);
    let per_stream: Vec<Vec<f64>> = plan
        .par_iter()
        .map(|&(seed, count)| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut word = vec![C64::zero(); dim * dim];
            let mut scratch = vec![C64::zero(); dim * dim];
            let mut out = Vec::with_capacity(count as usize);
            for _ in 0..count {
                identity_into(&mut word, dim);
                for _ in 0..opts.word_length {
                    // The extra index is the lazy step: apply nothing.
                    let pick = rng.gen_range(0..=gens.len());
                    if pick == gens.len() {
                        continue;
                    }
                    matmul_into(&word, &gens[pick], &mut scratch, dim);
                    std::mem::swap(&mut word, &mut scratch);
                }
                let tr: C64 = (0..dim).map(|i| word[i * dim + i]).sum();
                out.push(tr.norm().powi(exponent));
            }
            out
        })
        .collect();
    Ok(per_stream.into_iter().flatten().collect())
}

fn sample_matrix_free(
    fam: &GeneratorFamily,
    k: u32,
    opts: &McOptions,
    dim: usize,
) -> Result<Vec<f64>> {
    // Deduplicate by action on a few fixed random probe vectors; a unitary
    // is pinned down well beyond tolerance by its images of generic probes.
    let mut probe_rng = ChaCha12Rng::seed_from_u64(0x50524f4245);
    let probes: Vec<Vec<C64>> = (0..3).map(|_| random_unit_vector(dim, &mut probe_rng)).collect();
    let mut gens: Vec<TensorWordOperator> = Vec::new();
    let mut images: Vec<Vec<C64>> = Vec::new();
    for member in &fam.members {
        for op in [member.clone(), member.adjoint()] {
            let image: Vec<C64> = probes.iter().flat_map(|p| op.apply(p)).collect();
            let dup = images.iter().any(|h| matrix_buf_distance(h, &image) <= 1e-8);
            if !dup {
                gens.push(op);
                images.push(image);
            }
        }
    }

    let exponent = 2 * k as i32;
    let plan = stream_plan(opts);
    let per_stream: Vec<Vec<f64>> = plan
        .par_iter()
        .map(|&(seed, count)| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(count as usize);
            for _ in 0..count {
                // Lazy steps (index == gens.len()) simply drop out of the
                // factor list.
                let picks: Vec<usize> = (0..opts.word_length)
                    .map(|_| rng.gen_range(0..=gens.len()))
                    .filter(|&p| p < gens.len())
                    .collect();
                // tr w = Σ_i ⟨e_i| w |e_i⟩, one basis column at a time.
                let mut tr = C64::zero();
                let mut col = vec![C64::zero(); dim];
                for i in 0..dim {
                    col.iter_mut().for_each(|z| *z = C64::zero());
                    col[i] = C64::new(1.0, 0.0);
                    let mut cur = col.clone();
                    for &p in picks.iter().rev() {
                        cur = gens[p].apply(&cur);
                    }
                    tr += cur[i];
                }
                out.push(tr.norm().powi(exponent));
            }
            out
        })
        .collect();
    Ok(per_stream.into_iter().flatten().collect())
}

/// Frobenius distance between two same-shape row-major buffers.
fn matrix_buf_distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Overwrite a row-major square buffer of side `n` with the identity.
fn identity_into(buf: &mut [C64], n: usize) {
    buf.iter_mut().for_each(|z| *z = C64::zero());
    for i in 0..n {
        buf[i * n + i] = C64::new(1.0, 0.0);
    }
}

/// `out = a · b` for row-major square buffers of side `n`.
fn matmul_into(a: &[C64], b: &[C64], out: &mut [C64], n: usize) {
    out.iter_mut().for_each(|z| *z = C64::zero());
    for i in 0..n {
        let a_row = &a[i * n..(i + 1) * n];
        let out_row = &mut out[i * n..(i + 1) * n];
        for (l, &a_il) in a_row.iter().enumerate() {
            let b_row = &b[l * n..(l + 1) * n];
            for (o, &b_lj) in out_row.iter_mut().zip(b_row) {
                *o += a_il * b_lj;
            }
        }
    }
}

fn random_unit_vector(dim: usize, rng: &mut ChaCha12Rng) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim)
        .map(|_| {
            let (re, im) = normal_pair(rng);
            C64::new(re, im)
        })
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// Two independent standard normals via Box–Muller.
fn normal_pair(rng: &mut impl Rng) -> (f64, f64) {
    let u1: f64 = rng.gen();
    let u2: f64 = rng.gen();
    let r = (-2.0 * (1.0 - u1).ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    (r * c, r * s)
}

/// Haar value of the `2k`-th moment on `SU(m)`, where known exactly.
///
/// Supported: `k = 2` for all `m ≥ 2` (value 2), and `k = 4` for `m ≥ 5`
/// (value 24). Smaller `m` at `k = 4` picks up extra invariants from the
/// Levi-Civita tensor and is refused rather than approximated.
pub fn haar_reference(m: usize, k: u32) -> Result<f64> {
    match (m, k) {
        (m, 2) if m >= 2 => Ok(2.0),
        (m, 4) if m >= 5 => Ok(24.0),
        _ => Err(Error::Unsupported(format!(
            "no exact Haar reference for the {}-th moment on SU({m})",
            2 * k
        ))),
    }
}

/// Draw a Haar-distributed element of `SU(dim)`.
///
/// A complex Ginibre matrix is QR-factored, the phases of the diagonal of
/// `R` are absorbed into `Q` to make the unitary Haar on `U(dim)`, and the
/// result is rescaled to determinant 1 (a fixed root-of-unity ambiguity per
/// draw, harmless under Haar).
pub fn sample_su_haar(dim: usize, rng: &mut ChaCha12Rng) -> CMat {
    let mut g = CMat::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            let (re, im) = normal_pair(rng);
            g[(i, j)] = C64::new(re, im);
        }
    }
    let (q, r) = g.qr().expect("QR of a Ginibre matrix succeeds");
    let mut u = q;
    for j in 0..dim {
        let diag = r[(j, j)];
        let phase = if diag.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            diag / diag.norm()
        };
        for i in 0..dim {
            u[(i, j)] *= phase;
        }
    }
    let det: C64 = {
        use ndarray_linalg::Determinant;
        u.det().expect("determinant of a unitary matrix")
    };
    let (_, theta) = det.to_polar();
    let alpha = C64::from_polar(1.0, -theta / dim as f64);
    u.mapv_inplace(|z| z * alpha);
    u
}
