//! Clifford-group membership by Pauli conjugation, for prime local
//! dimension.
//!
//! A unitary is Clifford when it normalizes the generalized Pauli
//! (Weyl–Heisenberg) group. The test conjugates every single-site
//! generator `X_j`, `Z_j` and checks that the result is a Pauli element
//! times a phase: the candidate is decoded from its matrix (shift vector
//! from the support pattern, phase vector from entry ratios) and then
//! verified against the reconstruction within a tolerance. Decode-and-
//! verify never misclassifies: anything that fails reconstruction is
//! reported as non-Pauli.
//!
//! The test is basis-dependent: a conjugate of a Clifford group by a
//! non-Clifford unitary passes through undetected. Callers record that
//! caveat alongside any verdict that relies on a negative answer.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::gateset::GateSet;
use crate::tensor::{frobenius_distance, kron_mat, CMat};
use crate::{Error, Result};

/// Tolerance for matching a conjugated Pauli against its reconstruction.
pub const CLIFFORD_TOL: f64 = 1e-8;

/// Outcome of testing one gate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateCliffordStatus {
    pub label: String,
    pub clifford: bool,
    /// Description of the first failing conjugation, when not Clifford.
    pub witness: Option<String>,
}

/// Outcome of testing a whole gate set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CliffordReport {
    pub local_dim: u32,
    pub per_gate: Vec<GateCliffordStatus>,
    pub all_clifford: bool,
}

/// `true` for primes; trial division is ample for 32-bit inputs.
pub fn is_prime(d: u32) -> bool {
    if d < 2 {
        return false;
    }
    let mut f = 2u64;
    let d = d as u64;
    while f * f <= d {
        if d.is_multiple_of(f) {
            return false;
        }
        f += 1;
    }
    true
}

/// Cyclic shift `X|j⟩ = |j+1 mod d⟩`.
pub fn pauli_x_matrix(d: usize) -> CMat {
    let mut m = CMat::zeros((d, d));
    for j in 0..d {
        m[((j + 1) % d, j)] = C64::new(1.0, 0.0);
    }
    m
}

/// Clock `Z|j⟩ = ω^j |j⟩` with `ω = exp(2πi/d)`.
pub fn pauli_z_matrix(d: usize) -> CMat {
    let mut m = CMat::zeros((d, d));
    for j in 0..d {
        m[(j, j)] = root_of_unity(d, j);
    }
    m
}

fn root_of_unity(d: usize, power: usize) -> C64 {
    let angle = std::f64::consts::TAU * (power % d) as f64 / d as f64;
    C64::from_polar(1.0, angle)
}

/// Dense `X^a Z^b` on `n` sites (site 0 most significant), with per-site
/// exponent vectors `a`, `b`.
fn pauli_word(d: usize, a: &[usize], b: &[usize]) -> CMat {
    let mut m = Array2::from_elem((1, 1), C64::new(1.0, 0.0));
    for site in 0..a.len() {
        let mut factor = CMat::eye(d);
        for _ in 0..a[site] % d {
            factor = pauli_x_matrix(d).dot(&factor);
        }
        let mut z = CMat::eye(d);
        for _ in 0..b[site] % d {
            z = pauli_z_matrix(d).dot(&z);
        }
        m = kron_mat(&m, &factor.dot(&z));
    }
    m
}

/// Single-site generator embedded at `site` among `n` sites.
fn site_generator(d: usize, n: usize, site: usize, z: bool) -> CMat {
    let mut a = vec![0; n];
    let mut b = vec![0; n];
    if z {
        b[site] = 1;
    } else {
        a[site] = 1;
    }
    pauli_word(d, &a, &b)
}

/// Decode `c` as `λ · X^a Z^b`; `None` when the structure does not fit.
fn decode_pauli(c: &CMat, d: usize, n: usize) -> Option<(Vec<usize>, Vec<usize>, C64)> {
    let dim = c.nrows();
    // Support check: exactly one near-unimodular entry per column.
    let mut row_of = vec![usize::MAX; dim];
    for j in 0..dim {
        let mut found = None;
        for i in 0..dim {
            let mag = c[(i, j)].norm();
            if mag > CLIFFORD_TOL {
                if found.is_some() || (mag - 1.0).abs() > CLIFFORD_TOL {
                    return None;
                }
                found = Some(i);
            }
        }
        row_of[j] = found?;
    }
    // Shift vector from column 0: X^a sends |0…0⟩ to |a⟩.
    let a = digits(row_of[0], d, n);
    let lambda = c[(row_of[0], 0)];
    // Phase vector from the columns that set one site to 1.
    let mut b = vec![0usize; n];
    for (site, slot) in b.iter_mut().enumerate() {
        let j = d.pow((n - 1 - site) as u32);
        let ratio = c[(row_of[j], j)] / lambda;
        let steps = (ratio.arg() / (std::f64::consts::TAU / d as f64)).round();
        *slot = steps.rem_euclid(d as f64) as usize % d;
    }
    Some((a, b, lambda))
}

fn digits(mut index: usize, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for site in (0..n).rev() {
        out[site] = index % d;
        index /= d;
    }
    out
}

/// Check whether `c` equals a phase times a Pauli word, by decoding and
/// verifying the reconstruction within [`CLIFFORD_TOL`] Frobenius.
pub fn is_pauli_up_to_phase(c: &CMat, d: usize, n: usize) -> bool {
    match decode_pauli(c, d, n) {
        None => false,
        Some((a, b, lambda)) => {
            let rebuilt = pauli_word(d, &a, &b).mapv(|z| z * lambda);
            frobenius_distance(c, &rebuilt) <= CLIFFORD_TOL
        }
    }
}

/// Test one gate of dimension `d^n`: conjugate every `X_j`, `Z_j` and
/// demand a Pauli-up-to-phase result.
pub fn gate_clifford_witness(u: &CMat, d: u32, n: u32) -> Result<Option<String>> {
    if !is_prime(d) {
        return Err(Error::Unsupported(format!(
            "Clifford membership test requires prime local dimension, got {d}"
        )));
    }
    let (d, n) = (d as usize, n as usize);
    let udag = crate::tensor::adjoint(u);
    for site in 0..n {
        for (name, z) in [("X", false), ("Z", true)] {
            let p = site_generator(d, n, site, z);
            let conj = u.dot(&p).dot(&udag);
            if !is_pauli_up_to_phase(&conj, d, n) {
                return Ok(Some(format!("{name}_{site} conjugates outside the Pauli group")));
            }
        }
    }
    Ok(None)
}

/// Test every gate of a set; `all_clifford` is the conjunction.
pub fn clifford_member_test(gs: &GateSet) -> Result<CliffordReport> {
    let mut per_gate = Vec::with_capacity(gs.gates().len());
    let mut all = true;
    for gate in gs.gates() {
        let witness = gate_clifford_witness(gate.unitary.matrix(), gs.d(), gs.n())?;
        all &= witness.is_none();
        per_gate.push(GateCliffordStatus {
            label: gate.label.clone(),
            clifford: witness.is_none(),
            witness,
        });
    }
    Ok(CliffordReport {
        local_dim: gs.d(),
        per_gate,
        all_clifford: all,
    })
}
