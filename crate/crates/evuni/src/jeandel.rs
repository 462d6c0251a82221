//! The block-controlled involution families witnessing that no finite
//! register count suffices for universality checks.
//!
//! Starting from a two-qubit generating set Ω of involutions, the family
//! `B_{k}` controls each involution `A` on two target qubits by `k` extra
//! control qubits: `A` fires exactly when the controls read all-zero or
//! all-one. Placing the controlled gates on every `k`-subset of a shared
//! pool of `2k−1` controls multiplies the target action `m(z)` times on a
//! control string of weight `z`, with `m(z) = C(z,k) + C(2k−1−z,k)`. When
//! `k` is a power of two every `m(z)` is odd, so the product compiles the
//! bare involution exactly at `N = 2k+1` registers — while at `N = 2k−2`
//! the weight-`(k−1)` computational subspace is fixed by every placement,
//! so nothing interesting can be generated there yet.

use std::sync::Arc;

use ndarray::array;
use num_bigint::BigUint;
use num_complex::Complex64 as C64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::gateset::GateSet;
use crate::tensor::{frobenius_distance, CMat, TensorWordOperator, Unitary};
use crate::{Error, Limits, Result};

/// Tolerance for the `g² = cI` scalar-involution check.
const INVOLUTION_TOL: f64 = 1e-10;
/// Tolerance for the compiled-product identity.
const COMPILE_TOL: f64 = 1e-8;
/// Tolerance for the fixed-subspace witness.
const WITNESS_TOL: f64 = 1e-10;

/// One controlled involution of the family.
#[derive(Debug, Clone)]
pub struct BlockGate {
    pub label: String,
    /// The bare two-qubit involution `A` after phase normalization.
    pub involution: Unitary,
    /// The `(k+2)`-qubit controlled gate: targets are the two most
    /// significant qubits, controls the remaining `k`.
    pub matrix: Unitary,
}

/// The full family at a fixed control count `k`.
#[derive(Debug, Clone)]
pub struct JeandelFamily {
    pub k: u32,
    pub gates: Vec<BlockGate>,
}

impl JeandelFamily {
    /// Qubits acted on by one block gate.
    pub fn gate_arity(&self) -> u32 {
        self.k + 2
    }

    /// Register count at which the bare involutions compile exactly.
    pub fn compile_registers(&self) -> u32 {
        2 * self.k + 1
    }

    /// Register count at which the weight-`(k−1)` subspace stays fixed.
    pub fn witness_registers(&self) -> u32 {
        2 * self.k - 2
    }
}

/// The default involution generating set Ω on two qubits:
/// CZ, H on either qubit, controlled-(X+Y)/√2, and an irrational-axis
/// reflection on the first qubit. All five are Hermitian involutions and
/// together generate a dense subgroup of the projective unitary group.
pub fn default_omega() -> Vec<(String, CMat)> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let zero = C64::new(0.0, 0.0);

    let mut cz = CMat::eye(4);
    cz[(3, 3)] = C64::new(-1.0, 0.0);

    let h = array![
        [C64::new(s, 0.0), C64::new(s, 0.0)],
        [C64::new(s, 0.0), C64::new(-s, 0.0)]
    ];
    let eye = CMat::eye(2);
    let hi = crate::tensor::kron_mat(&h, &eye);
    let ih = crate::tensor::kron_mat(&eye, &h);

    // Controlled (X+Y)/√2: Hermitian involution on the target block.
    let mut cxy = CMat::eye(4);
    cxy[(2, 2)] = zero;
    cxy[(3, 3)] = zero;
    cxy[(2, 3)] = C64::new(s, -s);
    cxy[(3, 2)] = C64::new(s, s);

    // Reflection about an axis at angle 1 rad: irrational with respect to
    // the Hadamard axis, which makes the pair generate an infinite group.
    let (sn, cs) = (1.0f64.sin(), 1.0f64.cos());
    let a = array![
        [C64::new(sn, 0.0), C64::new(cs, 0.0)],
        [C64::new(cs, 0.0), C64::new(-sn, 0.0)]
    ];
    let ai = crate::tensor::kron_mat(&a, &eye);

    vec![
        ("CZ".into(), cz),
        ("HI".into(), hi),
        ("IH".into(), ih),
        ("CXY".into(), cxy),
        ("AI".into(), ai),
    ]
}

/// The default Ω as a loaded gate set (inverse closure included).
pub fn default_omega_gateset(limits: &Limits) -> Result<GateSet> {
    GateSet::from_matrices(2, 2, default_omega(), limits)
}

/// `C(n, k)` as an exact integer.
pub fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Number of `k`-subsets of the `2k−1` control positions activated by a
/// control string of weight `z`: `C(z,k) + C(2k−1−z,k)`.
pub fn activation_multiplicity(k: u32, z: u32) -> BigUint {
    binomial(z, k) + binomial(2 * k - 1 - z, k)
}

/// Whether every weight class activates an odd number of subsets; holds
/// exactly when `k` is a power of two.
pub fn parity_lemma_holds(k: u32) -> bool {
    (0..=(2 * k - 1)).all(|z| activation_multiplicity(k, z).bit(0))
}

/// Parity table of `C(2^j + q, 2^j)` for `q = 0..=q_max`: the binomials
/// whose oddness (guaranteed for `q ≤ 2^j − 1` by Kummer's theorem) makes
/// the power-of-two compile identity work. Returns `(q, is_odd)` pairs.
pub fn parity_lemma_check(j: u32, q_max: u32) -> Vec<(u32, bool)> {
    let k = 1u32 << j;
    (0..=q_max)
        .map(|q| (q, binomial(k + q, k).bit(0)))
        .collect()
}

/// Normalize a loaded gate to a genuine involution: accept `g² = cI` with
/// `|c| = 1`, divide by the principal square root of `c`, and fix the
/// residual global sign so equal gates normalize identically.
fn involution_from(label: &str, gate: &Unitary) -> Result<Unitary> {
    let m = gate.matrix();
    let dim = gate.dim();
    let sq = m.dot(m);
    let c = sq[(0, 0)];
    let mut defect = (c.norm() - 1.0).abs();
    for i in 0..dim {
        for j in 0..dim {
            let want = if i == j { c } else { C64::new(0.0, 0.0) };
            defect = defect.max((sq[(i, j)] - want).norm());
        }
    }
    if defect > INVOLUTION_TOL {
        return Err(Error::NonInvolution {
            label: label.to_string(),
            defect,
        });
    }
    let root = c.sqrt();
    let mut a = m.mapv(|e| e / root);
    // The square root leaves an overall ± ambiguity; anchor it on the
    // first entry of visible magnitude.
    let anchor = a
        .iter()
        .find(|e| e.norm() > 1e-8)
        .copied()
        .unwrap_or_else(|| C64::new(1.0, 0.0));
    let flip = if anchor.re.abs() > 1e-8 * anchor.norm() {
        anchor.re < 0.0
    } else {
        anchor.im < 0.0
    };
    if flip {
        a.mapv_inplace(|e| -e);
    }
    let unit = Unitary::new(a, crate::tensor::UNITARY_TOL, label)?;
    let resq = unit.matrix().dot(unit.matrix());
    let mut residual = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let want = if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
            residual = residual.max((resq[(i, j)] - want).norm());
        }
    }
    if residual > INVOLUTION_TOL {
        return Err(Error::NonInvolution {
            label: label.to_string(),
            defect: residual,
        });
    }
    Ok(unit)
}

/// The controlled matrix `B` for involution `a`: indices split as
/// `t·2^k + c` with the two targets most significant; `a` acts on the
/// target block exactly when `c` is all-zero or all-one.
fn block_gate_matrix(a: &CMat, k: u32) -> CMat {
    let controls = 1usize << k;
    let dim = 4 * controls;
    let mut b = CMat::eye(dim);
    for c in [0, controls - 1] {
        for t in 0..4 {
            for tp in 0..4 {
                b[(t * controls + c, tp * controls + c)] = a[(t, tp)];
            }
        }
    }
    b
}

/// Build the family `B_{k}` from a two-qubit involution set.
pub fn build_family(gs: &GateSet, k: u32, limits: &Limits) -> Result<JeandelFamily> {
    if gs.d() != 2 || gs.n() != 2 {
        return Err(Error::Unsupported(format!(
            "block-controlled families need a two-qubit base set, got d={}, n={}",
            gs.d(),
            gs.n()
        )));
    }
    if k < 2 {
        return Err(Error::InvalidHeader(format!(
            "control count must be at least 2, got k={k}"
        )));
    }
    let dim = crate::tensor::checked_power(2, k as usize + 2)?;
    if dim > limits.dense_threshold {
        return Err(Error::ResourceLimit {
            what: "block gate dimension".into(),
            requested: dim,
            limit: limits.dense_threshold,
        });
    }

    let mut gates: Vec<BlockGate> = Vec::new();
    for gate in gs.gates() {
        let involution = involution_from(&gate.label, &gate.unitary)?;
        // Inverse closure re-derives the same involution from an adjoint;
        // keep one copy.
        if gates
            .iter()
            .any(|g| frobenius_distance(g.involution.matrix(), involution.matrix()) <= 1e-10)
        {
            continue;
        }
        let b = block_gate_matrix(involution.matrix(), k);
        let matrix = Unitary::new(b, crate::tensor::UNITARY_TOL, &gate.label)?;
        gates.push(BlockGate {
            label: format!("B[{}]", gate.label),
            involution,
            matrix,
        });
    }
    Ok(JeandelFamily { k, gates })
}

/// Lexicographic `k`-subsets of `pool`.
fn k_subsets(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(pool: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for i in start..=pool.len().saturating_sub(need) {
            cur.push(pool[i]);
            rec(pool, k, i + 1, cur, out);
            cur.pop();
        }
    }
    if k <= pool.len() {
        rec(pool, k, 0, &mut cur, &mut out);
    }
    out
}

/// One gate's compile check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompileCheck {
    pub label: String,
    pub distance: f64,
    pub passed: bool,
}

/// Result of compiling the bare involutions at `N = 2k+1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompileReport {
    pub k: u32,
    pub register_count: u32,
    pub subset_count: usize,
    pub tolerance: f64,
    pub checks: Vec<CompileCheck>,
    pub all_passed: bool,
}

/// Multiply the block gate over every `k`-subset of the shared control
/// pool and compare against the bare involution on the targets.
pub fn compile_and_verify(fam: &JeandelFamily, limits: &Limits) -> Result<CompileReport> {
    let k = fam.k;
    let n = fam.compile_registers() as usize;
    let dim = crate::tensor::checked_power(2, n)?;
    if dim > limits.dense_threshold {
        return Err(Error::ResourceLimit {
            what: "compile register dimension".into(),
            requested: dim,
            limit: limits.dense_threshold,
        });
    }
    let pool: Vec<usize> = (2..=(2 * k as usize)).collect();
    let subsets = k_subsets(&pool, k as usize);

    let mut checks = Vec::new();
    for gate in &fam.gates {
        let mut acc = CMat::eye(dim);
        let block = Arc::new(gate.matrix.clone());
        for subset in &subsets {
            let mut targets = vec![0usize, 1usize];
            targets.extend_from_slice(subset);
            let op = TensorWordOperator::from_gate(2, n, block.clone(), targets)?;
            acc = op.to_dense(limits)?.dot(&acc);
        }
        let bare = TensorWordOperator::from_gate(
            2,
            n,
            Arc::new(gate.involution.clone()),
            vec![0, 1],
        )?
        .to_dense(limits)?;
        let distance = frobenius_distance(&acc, &bare);
        checks.push(CompileCheck {
            label: gate.label.clone(),
            distance,
            passed: distance <= COMPILE_TOL,
        });
    }
    let all_passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
    Ok(CompileReport {
        k,
        register_count: fam.compile_registers(),
        subset_count: subsets.len(),
        tolerance: COMPILE_TOL,
        checks,
        all_passed,
    })
}

/// Result of the fixed-subspace witness at `N = 2k−2`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessReport {
    pub k: u32,
    pub register_count: u32,
    pub subspace_dimension: usize,
    pub placements_per_gate: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Check that every placement of every block gate on `N = 2k−2` registers
/// fixes each weight-`(k−1)` computational basis vector: with only `k−1`
/// ones and `k−1` zeros available, no `k` controls can read all-equal.
pub fn invariance_witness(fam: &JeandelFamily, limits: &Limits) -> Result<WitnessReport> {
    let k = fam.k as usize;
    if k < 4 {
        return Err(Error::Unsupported(format!(
            "the fixed-subspace witness needs k ≥ 4 so that 2k−2 ≥ k+2, got k={}",
            fam.k
        )));
    }
    let n = fam.witness_registers() as usize;
    let dim = crate::tensor::checked_power(2, n)?;
    if dim > limits.dense_threshold {
        return Err(Error::ResourceLimit {
            what: "witness register dimension".into(),
            requested: dim,
            limit: limits.dense_threshold,
        });
    }

    // Ordered target pairs, then control subsets from the rest.
    let mut placements: Vec<Vec<usize>> = Vec::new();
    for t0 in 0..n {
        for t1 in 0..n {
            if t0 == t1 {
                continue;
            }
            let rest: Vec<usize> = (0..n).filter(|&q| q != t0 && q != t1).collect();
            for subset in k_subsets(&rest, k) {
                let mut targets = vec![t0, t1];
                targets.extend_from_slice(&subset);
                placements.push(targets);
            }
        }
    }
    let placements_per_gate = placements.len();

    let basis: Vec<usize> = (0..dim)
        .filter(|x| x.count_ones() as usize == k - 1)
        .collect();
    let subspace_dimension = basis.len();

    let mut max_deviation = 0.0f64;
    for gate in &fam.gates {
        let block = Arc::new(gate.matrix.clone());
        for targets in &placements {
            let op = TensorWordOperator::from_gate(2, n, block.clone(), targets.clone())?;
            for &x in &basis {
                let mut v = vec![C64::new(0.0, 0.0); dim];
                v[x] = C64::new(1.0, 0.0);
                let out = op.apply(&v);
                let mut dev = 0.0f64;
                for (i, e) in out.iter().enumerate() {
                    let want = if i == x { 1.0 } else { 0.0 };
                    dev += (e - C64::new(want, 0.0)).norm_sqr();
                }
                max_deviation = max_deviation.max(dev.sqrt());
            }
        }
    }
    Ok(WitnessReport {
        k: fam.k,
        register_count: fam.witness_registers(),
        subspace_dimension,
        placements_per_gate,
        max_deviation,
        tolerance: WITNESS_TOL,
        passed: max_deviation <= WITNESS_TOL,
    })
}

/// Emit the family as a loadable gate set on `k+2` qubits.
pub fn family_as_gateset(fam: &JeandelFamily, limits: &Limits) -> Result<GateSet> {
    let gates: Vec<(String, CMat)> = fam
        .gates
        .iter()
        .map(|g| (g.label.clone(), g.matrix.matrix().clone()))
        .collect();
    GateSet::from_matrices(2, fam.k + 2, gates, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateset::load_gateset;

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn default_omega_loads_with_inverse_closure() {
        let gs = default_omega_gateset(&limits()).unwrap();
        assert_eq!(gs.d(), 2);
        assert_eq!(gs.n(), 2);
        // CZ and CXY pick up a −1 determinant, so their phase-normalized
        // forms are not self-inverse and closure adds two adjoints.
        assert_eq!(gs.gates().len(), 7);
        let labels: Vec<&str> = gs.gates().iter().map(|g| g.label.as_str()).collect();
        assert!(labels.contains(&"CZ†"));
        assert!(labels.contains(&"CXY†"));
    }

    #[test]
    fn block_gate_applies_involution_only_on_extreme_controls() {
        let fam = build_family(&default_omega_gateset(&limits()).unwrap(), 2, &limits()).unwrap();
        // Phase normalization followed by involution normalization must
        // recover the plain CZ.
        let bcz = fam.gates.iter().find(|g| g.label == "B[CZ]").unwrap();
        let mut plain = CMat::eye(4);
        plain[(3, 3)] = C64::new(-1.0, 0.0);
        assert!(frobenius_distance(bcz.involution.matrix(), &plain) <= 1e-12);

        let b = bcz.matrix.matrix();
        let dim = 16;
        // Control 01 (c=1): nothing fires, basis vectors pass through.
        for t in 0..4 {
            let idx = t * 4 + 1;
            for r in 0..dim {
                let want = if r == idx { 1.0 } else { 0.0 };
                assert!((b[(r, idx)] - C64::new(want, 0.0)).norm() <= 1e-14);
            }
        }
        // Control 00: CZ fires, so t=3 flips sign.
        assert!((b[(12, 12)] - C64::new(-1.0, 0.0)).norm() <= 1e-12);
        // Involution survives the controlled construction.
        let sq = b.dot(b);
        assert!(frobenius_distance(&sq, &CMat::eye(dim)) <= 1e-12);
    }

    #[test]
    fn non_involutions_are_rejected() {
        let t = array![
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [
                C64::new(0.0, 0.0),
                C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)
            ]
        ];
        let gs = GateSet::from_matrices(2, 2, vec![
            ("TI".into(), crate::tensor::kron_mat(&t, &CMat::eye(2))),
        ], &limits())
        .unwrap();
        let err = build_family(&gs, 2, &limits()).unwrap_err();
        assert!(matches!(err, Error::NonInvolution { .. }));
    }

    #[test]
    fn activation_parity_distinguishes_powers_of_two() {
        assert_eq!(activation_multiplicity(2, 0), BigUint::from(3u32));
        assert_eq!(activation_multiplicity(2, 2), BigUint::from(1u32));
        assert_eq!(activation_multiplicity(3, 0), BigUint::from(10u32));
        assert_eq!(activation_multiplicity(3, 4), BigUint::from(4u32));
        for j in 1..=4u32 {
            assert!(parity_lemma_holds(1 << j), "k = 2^{j} must pass");
            let k = 1u32 << j;
            let table = parity_lemma_check(j, k - 1);
            assert_eq!(table.len(), k as usize);
            assert!(table.iter().all(|&(_, odd)| odd));
        }
        assert!(!parity_lemma_holds(3));
        assert!(!parity_lemma_holds(5));
        assert!(!parity_lemma_holds(6));
        // The power-of-two hypothesis is necessary: C(4,3) = 4 is even.
        assert_eq!(binomial(4, 3), BigUint::from(4u32));
        assert!(!binomial(4, 3).bit(0));
    }

    #[test]
    fn compile_identity_holds_for_k2() {
        let fam = build_family(&default_omega_gateset(&limits()).unwrap(), 2, &limits()).unwrap();
        let report = compile_and_verify(&fam, &limits()).unwrap();
        assert_eq!(report.register_count, 5);
        assert_eq!(report.subset_count, 3);
        assert!(report.all_passed, "distances: {:?}", report.checks);
        for check in &report.checks {
            assert!(check.distance <= 1e-8);
        }
    }

    #[test]
    fn compile_identity_fails_for_k3() {
        let fam = build_family(&default_omega_gateset(&limits()).unwrap(), 3, &limits()).unwrap();
        let report = compile_and_verify(&fam, &limits()).unwrap();
        assert_eq!(report.subset_count, 10);
        assert!(!report.all_passed);
        // The all-zero control sector fires an even number of times, so
        // every non-identity involution misses its target.
        assert!(report.checks.iter().all(|c| !c.passed));
    }

    #[test]
    fn witness_fixes_the_low_weight_subspace_at_k4() {
        let fam = build_family(&default_omega_gateset(&limits()).unwrap(), 4, &limits()).unwrap();
        let report = invariance_witness(&fam, &limits()).unwrap();
        assert_eq!(report.register_count, 6);
        assert_eq!(report.subspace_dimension, 20);
        assert_eq!(report.placements_per_gate, 30);
        assert!(report.passed, "max deviation {}", report.max_deviation);
    }

    #[test]
    fn witness_detects_a_planted_defect() {
        let mut fam =
            build_family(&default_omega_gateset(&limits()).unwrap(), 4, &limits()).unwrap();
        let mut m = fam.gates[0].matrix.matrix().clone();
        m[(7, 7)] += C64::new(1e-3, 0.0);
        fam.gates[0].matrix = Unitary::new_unchecked(m);
        let report = invariance_witness(&fam, &limits()).unwrap();
        assert!(!report.passed);
        assert!(report.max_deviation > 1e-4);
    }

    #[test]
    fn emitted_family_round_trips_through_the_loader() {
        let fam = build_family(&default_omega_gateset(&limits()).unwrap(), 2, &limits()).unwrap();
        let gs = family_as_gateset(&fam, &limits()).unwrap();
        assert_eq!(gs.n(), 4);
        let text = gs.to_json();
        let reloaded = load_gateset(&text, &limits()).unwrap();
        assert_eq!(reloaded.d(), 2);
        assert_eq!(reloaded.n(), 4);
        // Block gates are real involutions with unit determinant, so the
        // loader neither rescales nor adds inverses.
        assert_eq!(reloaded.gates().len(), fam.gates.len());
        for (a, b) in reloaded.gates().iter().zip(fam.gates.iter()) {
            assert!(frobenius_distance(a.unitary.matrix(), b.matrix.matrix()) <= 1e-12);
        }
    }
}
