//! Shared integration-test helpers: an independent closure-enumeration
//! oracle for group moments and a deterministic generator of random finite
//! (monomial) gate sets.
//!
//! The oracle deliberately avoids the library's fixed-subspace machinery:
//! it multiplies dense matrices breadth-first until the closure stops
//! growing and averages `|tr g|^{2k}` over the elements, so agreement with
//! `exact_moment` is a genuine two-route check.

use std::collections::HashMap;
use std::path::PathBuf;

use evuni::gateset::{load_gateset, GateSet};
use evuni::tensor::CMat;
use evuni::Limits;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Path of a checked-in gate-set fixture.
pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../gatesets")
        .join(name)
}

/// Load a fixture through the ordinary parsing pipeline.
pub fn load_fixture(name: &str, limits: &Limits) -> GateSet {
    let text = std::fs::read_to_string(fixture_path(name))
        .unwrap_or_else(|e| panic!("fixture {name}: {e}"));
    load_gateset(&text, limits).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

fn mat_mul(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows();
    let mut out = CMat::zeros((n, n));
    for i in 0..n {
        for k in 0..n {
            let aik = a[(i, k)];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += aik * b[(k, j)];
            }
        }
    }
    out
}

fn adjoint(a: &CMat) -> CMat {
    let n = a.nrows();
    CMat::from_shape_fn((n, n), |(i, j)| a[(j, i)].conj())
}

/// Quantized whole-matrix key; adequate because every element of the groups
/// enumerated here has entries from a fixed finite alphabet, far from the
/// half-grid boundaries of the 1e-6 quantization.
fn key_of(m: &CMat) -> Vec<i64> {
    m.iter()
        .flat_map(|z| {
            [
                (z.re * 1e6).round() as i64,
                (z.im * 1e6).round() as i64,
            ]
        })
        .collect()
}

/// Breadth-first closure of `gens ∪ adjoints` under multiplication,
/// starting from the identity. Returns `None` when the closure exceeds
/// `cap` elements.
pub fn enumerate_closure(gens: &[CMat], cap: usize) -> Option<Vec<CMat>> {
    let dim = gens.first().map(|g| g.nrows()).unwrap_or(0);
    let mut all_gens: Vec<CMat> = Vec::new();
    for g in gens {
        all_gens.push(g.clone());
        all_gens.push(adjoint(g));
    }

    let mut elements: Vec<CMat> = vec![CMat::eye(dim)];
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    seen.insert(key_of(&elements[0]), 0);
    let mut frontier = vec![0usize];

    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &idx in &frontier {
            for g in &all_gens {
                let prod = mat_mul(&elements[idx], g);
                let key = key_of(&prod);
                if let std::collections::hash_map::Entry::Vacant(slot) = seen.entry(key) {
                    if elements.len() >= cap {
                        return None;
                    }
                    slot.insert(elements.len());
                    next.push(elements.len());
                    elements.push(prod);
                }
            }
        }
        frontier = next;
    }
    Some(elements)
}

/// Average of `|tr g|^{2k}` over a list of group elements.
pub fn closure_moment(elements: &[CMat], k: u32) -> f64 {
    let sum: f64 = elements
        .iter()
        .map(|m| {
            let tr: C64 = (0..m.nrows()).map(|i| m[(i, i)]).sum();
            tr.norm_sqr().powi(k as i32)
        })
        .sum();
    sum / elements.len() as f64
}

/// A random monomial matrix (permutation × diagonal) with `q`-th-root
/// phases and determinant exactly 1, so the normalization pipeline leaves
/// it unchanged and the generated group stays finite and small.
pub fn random_monomial(dim: usize, q: u32, rng: &mut ChaCha12Rng) -> CMat {
    // Random permutation via Fisher-Yates.
    let mut perm: Vec<usize> = (0..dim).collect();
    for i in (1..dim).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    // Permutation sign from its cycle type.
    let mut sign = 1.0f64;
    let mut visited = vec![false; dim];
    for s in 0..dim {
        if visited[s] {
            continue;
        }
        let mut len = 0;
        let mut t = s;
        while !visited[t] {
            visited[t] = true;
            t = perm[t];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    // q-th-root phases; the last one compensates the rest and the sign so
    // the determinant is exactly one.
    let root = std::f64::consts::TAU / q as f64;
    let mut phases: Vec<C64> = (0..dim - 1)
        .map(|_| C64::from_polar(1.0, root * rng.gen_range(0..q) as f64))
        .collect();
    let partial: C64 = phases.iter().product();
    phases.push((partial * sign).conj());

    let mut m = CMat::zeros((dim, dim));
    for (col, (&row, phase)) in perm.iter().zip(phases).enumerate() {
        m[(row, col)] = phase;
    }
    m
}

/// A deterministic "random" gate set of two monomial generators whose
/// strict closure has at most `cap` elements. Seeds that produce a larger
/// closure are skipped, so the function always returns a usable instance.
pub fn random_finite_gateset(seed: u64, cap: usize, limits: &Limits) -> (GateSet, Vec<CMat>) {
    for attempt in 0..64u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ attempt);
        let dim = [2usize, 3, 4][rng.gen_range(0..3)];
        let q = [2u32, 3, 4][rng.gen_range(0..3)];
        let g1 = random_monomial(dim, q, &mut rng);
        let g2 = random_monomial(dim, q, &mut rng);
        let closure = match enumerate_closure(&[g1.clone(), g2.clone()], cap) {
            Some(c) => c,
            None => continue,
        };
        let gs = GateSet::from_matrices(
            dim as u32,
            1,
            [("M1".to_string(), g1), ("M2".to_string(), g2)],
            limits,
        )
        .expect("monomial generators are unitary");
        return (gs, closure);
    }
    panic!("no finite monomial gate set found for seed {seed}");
}
