//! Exact bounded scans of the Diophantine conditions that pin down the
//! exceptional dimensions in the 2-group classification.
//!
//! The Lie-type branch asks when `d^N` can equal `(3^k − 1)/2`,
//! `(3^k + 1)/2`, or `(2^k − (−1)^k)/3`; the first has exactly the
//! solutions `(d, N) = (2, 2)` and `(11, 2)` and the other two none. The
//! repunit and Pell-like scans corroborate the classical results backing
//! those claims. Everything here is big-integer arithmetic — no floating
//! point — so the scans are exact within their bounds; enlarging bounds
//! can only add solutions, never remove any.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

/// Default bounds: each scan finishes in seconds and covers every known
/// solution with room to spare.
pub const DEFAULT_LIE_D_MAX: u64 = 1000;
pub const DEFAULT_LIE_N_MAX: u32 = 40;
pub const DEFAULT_LIE_K_MAX: u32 = 200;
pub const DEFAULT_REPUNIT_MINUS_X_MAX: u64 = 10_000;
pub const DEFAULT_REPUNIT_MINUS_N_MAX: u32 = 20;
pub const DEFAULT_REPUNIT_MINUS_Q_MAX: u32 = 10;
pub const DEFAULT_REPUNIT_PLUS_X_MAX: u64 = 100;
pub const DEFAULT_REPUNIT_PLUS_N_MAX: u32 = 25;
pub const DEFAULT_REPUNIT_PLUS_Q_MAX: u32 = 6;
pub const DEFAULT_COHN_Y_MAX: u64 = 1_000_000;
pub const DEFAULT_COHN_Z_MAX: u64 = 1000;
pub const DEFAULT_COHN_K_MAX: u32 = 40;

/// The three Lie-type dimension equations for `d^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LieEquation {
    /// `d^N = (3^k − 1)/2`
    ThreeMinus,
    /// `d^N = (3^k + 1)/2`
    ThreePlus,
    /// `d^N = (2^k − (−1)^k)/3` (the alternating form that is an integer
    /// for every `k`; with the opposite sign the numerator is ≡ ±2 mod 3
    /// and never divisible).
    TwoAlt,
}

/// One exact solution `d^N = rhs(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DiophSolution {
    pub equation: LieEquation,
    pub d: u64,
    #[serde(rename = "N")]
    pub n: u32,
    pub k: u32,
}

fn rhs(eq: LieEquation, k: u32) -> BigUint {
    match eq {
        LieEquation::ThreeMinus => (BigUint::from(3u32).pow(k) - 1u32) / 2u32,
        LieEquation::ThreePlus => (BigUint::from(3u32).pow(k) + 1u32) / 2u32,
        LieEquation::TwoAlt => {
            let two_k = BigUint::from(2u32).pow(k);
            if k.is_multiple_of(2) {
                (two_k - 1u32) / 3u32
            } else {
                (two_k + 1u32) / 3u32
            }
        }
    }
}

/// Exhaustive exact search for `d^N = rhs(k)` over `d ∈ [2, d_max]`,
/// `N ∈ [2, n_max]`, `k ∈ [1, k_max]`, all three equations. Output is
/// sorted and duplicate-free.
pub fn scan_lie_type(d_max: u64, n_max: u32, k_max: u32) -> Vec<DiophSolution> {
    let mut out = Vec::new();
    let d_max_big = BigUint::from(d_max);
    for eq in [
        LieEquation::ThreeMinus,
        LieEquation::ThreePlus,
        LieEquation::TwoAlt,
    ] {
        for k in 1..=k_max {
            let v = rhs(eq, k);
            if v < BigUint::from(4u32) {
                // d ≥ 2, N ≥ 2 forces d^N ≥ 4.
                continue;
            }
            for n in 2..=n_max {
                let r = v.nth_root(n);
                if r < BigUint::from(2u32) || r > d_max_big {
                    continue;
                }
                if r.pow(n) == v {
                    let d: u64 = (&r).try_into().expect("root bounded by d_max");
                    out.push(DiophSolution { equation: eq, d, n, k });
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Sign variant of the repunit equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepunitSign {
    /// `y^q = (x^n − 1)/(x − 1)` with `n > 2`
    Minus,
    /// `y^q = (x^n + 1)/(x + 1)` with odd `n ≥ 5`
    Plus,
}

/// One exact repunit power. `y` is reported as a decimal string because
/// it can exceed machine integers within the scan bounds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RepunitSolution {
    pub x: u64,
    pub y: String,
    pub n: u32,
    pub q: u32,
}

/// Exhaustive exact scan for perfect powers among generalized repunits:
/// `x ∈ [2, x_max]`, `n` up to `n_max` (minus: all `n ≥ 3`; plus: odd
/// `n ≥ 5`), `q ∈ [2, q_max]`, `y > 1`.
pub fn scan_repunit(x_max: u64, n_max: u32, q_max: u32, sign: RepunitSign) -> Vec<RepunitSolution> {
    let mut out = Vec::new();
    let n_lo: u32 = match sign {
        RepunitSign::Minus => 3,
        RepunitSign::Plus => 5,
    };
    for x in 2..=x_max {
        let xb = BigUint::from(x);
        // Maintain x^n incrementally across the n loop.
        let mut x_pow = xb.pow(n_lo.saturating_sub(1));
        for n in n_lo..=n_max.max(n_lo) {
            if n > n_max {
                break;
            }
            x_pow = &x_pow * &xb;
            if matches!(sign, RepunitSign::Plus) && n % 2 == 0 {
                continue;
            }
            let v = match sign {
                RepunitSign::Minus => (&x_pow - 1u32) / (x - 1),
                RepunitSign::Plus => (&x_pow + 1u32) / (x + 1),
            };
            for q in 2..=q_max {
                let r = v.nth_root(q);
                if r <= BigUint::one() {
                    break; // roots only shrink as q grows
                }
                if r.pow(q) == v {
                    out.push(RepunitSolution {
                        x,
                        y: r.to_string(),
                        n,
                        q,
                    });
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// One exact solution of `y² − 2z^k = −1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CohnSolution {
    pub y: u64,
    pub z: u64,
    pub k: u32,
}

/// Exhaustive exact scan of `y² = 2z^k − 1` for `k > 2`, `z ∈ [1, z_max]`,
/// reporting solutions with `y ≤ y_max`.
pub fn scan_cohn(y_max: u64, z_max: u64, k_max: u32) -> Vec<CohnSolution> {
    let mut out = Vec::new();
    let y_cap = BigUint::from(y_max);
    let y_cap_sq = &y_cap * &y_cap;
    for z in 1..=z_max {
        let zb = BigUint::from(z);
        let mut z_pow = zb.pow(2u32);
        for k in 3..=k_max {
            z_pow = &z_pow * &zb;
            let t = &z_pow * 2u32 - 1u32;
            if t > y_cap_sq {
                break; // grows monotonically in k for z ≥ 2; z = 1 never hits this
            }
            let y = t.sqrt();
            if &y * &y == t {
                out.push(CohnSolution {
                    y: (&y).try_into().expect("bounded by y_max"),
                    z,
                    k,
                });
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn lie_type_defaults_find_exactly_the_two_known_solutions() {
        let sols = scan_lie_type(DEFAULT_LIE_D_MAX, DEFAULT_LIE_N_MAX, DEFAULT_LIE_K_MAX);
        assert_eq!(
            sols,
            vec![
                DiophSolution {
                    equation: LieEquation::ThreeMinus,
                    d: 2,
                    n: 2,
                    k: 2
                },
                DiophSolution {
                    equation: LieEquation::ThreeMinus,
                    d: 11,
                    n: 2,
                    k: 5
                },
            ]
        );
    }

    #[test]
    fn lie_type_solutions_check_arithmetically() {
        // (3² − 1)/2 = 4 = 2² and (3⁵ − 1)/2 = 121 = 11².
        assert_eq!(rhs(LieEquation::ThreeMinus, 2), BigUint::from(4u32));
        assert_eq!(rhs(LieEquation::ThreeMinus, 5), BigUint::from(121u32));
        assert_eq!(BigUint::from(11u32).pow(2u32), BigUint::from(121u32));
        // The alternating two-power form is always an integer.
        assert_eq!(rhs(LieEquation::TwoAlt, 5), BigUint::from(11u32));
        assert_eq!(rhs(LieEquation::TwoAlt, 6), BigUint::from(21u32));
    }

    #[test]
    fn lie_type_restricted_to_prime_powers_is_unchanged() {
        fn is_prime_power(mut m: u64) -> bool {
            if m < 2 {
                return false;
            }
            let mut p = 2;
            while p * p <= m {
                if m.is_multiple_of(p) {
                    while m.is_multiple_of(p) {
                        m /= p;
                    }
                    return m == 1;
                }
                p += 1;
            }
            true // m itself is prime
        }
        let sols = scan_lie_type(DEFAULT_LIE_D_MAX, DEFAULT_LIE_N_MAX, DEFAULT_LIE_K_MAX);
        let restricted: Vec<_> = sols
            .iter()
            .filter(|s| is_prime_power(s.d))
            .cloned()
            .collect();
        assert_eq!(restricted, sols);
        assert_eq!(restricted.len(), 2);
    }

    #[test]
    fn repunit_minus_defaults_find_exactly_the_three_classical_tuples() {
        let sols = scan_repunit(
            DEFAULT_REPUNIT_MINUS_X_MAX,
            DEFAULT_REPUNIT_MINUS_N_MAX,
            DEFAULT_REPUNIT_MINUS_Q_MAX,
            RepunitSign::Minus,
        );
        let expect: Vec<RepunitSolution> = vec![
            RepunitSolution { x: 3, y: "11".into(), n: 5, q: 2 },
            RepunitSolution { x: 7, y: "20".into(), n: 4, q: 2 },
            RepunitSolution { x: 18, y: "7".into(), n: 3, q: 3 },
        ];
        let got: HashSet<_> = sols.iter().cloned().collect();
        let want: HashSet<_> = expect.iter().cloned().collect();
        assert_eq!(got, want, "solutions: {sols:?}");
        // (7⁴ − 1)/6 = 400 = 20².
        assert_eq!((7u64.pow(4) - 1) / 6, 400);
        assert_eq!((18u64.pow(3) - 1) / 17, 343);
    }

    #[test]
    fn repunit_plus_scan_is_empty_in_the_default_range() {
        let sols = scan_repunit(
            DEFAULT_REPUNIT_PLUS_X_MAX,
            DEFAULT_REPUNIT_PLUS_N_MAX,
            DEFAULT_REPUNIT_PLUS_Q_MAX,
            RepunitSign::Plus,
        );
        assert!(sols.is_empty(), "unexpected: {sols:?}");
    }

    #[test]
    fn cohn_scan_finds_the_nontrivial_solution_and_the_trivial_family() {
        let sols = scan_cohn(DEFAULT_COHN_Y_MAX, DEFAULT_COHN_Z_MAX, DEFAULT_COHN_K_MAX);
        assert_eq!(239u64 * 239, 2 * 13u64.pow(4) - 1);
        let nontrivial: Vec<_> = sols.iter().filter(|s| s.z != 1).collect();
        assert_eq!(nontrivial, vec![&CohnSolution { y: 239, z: 13, k: 4 }]);
        let trivial: Vec<_> = sols.iter().filter(|s| s.z == 1).collect();
        assert_eq!(trivial.len(), (DEFAULT_COHN_K_MAX - 2) as usize);
        assert!(trivial.iter().all(|s| s.y == 1 && s.z == 1));
    }

    #[test]
    fn enlarging_bounds_only_adds_solutions() {
        let small: HashSet<_> = scan_lie_type(11, 2, 5).into_iter().collect();
        let big: HashSet<_> = scan_lie_type(1000, 40, 200).into_iter().collect();
        assert!(small.is_subset(&big));
        assert_eq!(small.len(), 2, "both known solutions fit the small bounds");

        let small_r: HashSet<_> =
            scan_repunit(20, 5, 3, RepunitSign::Minus).into_iter().collect();
        let big_r: HashSet<_> =
            scan_repunit(100, 10, 5, RepunitSign::Minus).into_iter().collect();
        assert!(small_r.is_subset(&big_r));
        assert_eq!(small_r.len(), 3);
    }
}
