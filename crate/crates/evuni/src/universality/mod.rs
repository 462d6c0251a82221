//! Decision engine for eventual universality.
//!
//! A gate set on `n` qudits of prime-power-free... — concretely: the engine
//! scans register counts `N = n, n+1, …` up to the moment bound
//! `d⁴(n−1)+1`, and at each `N` applies the two-step criterion: the closure
//! of the promoted family is dense in `SU(d^N)` exactly when its fourth
//! moment equals the Haar value 2 *and* the generated group is infinite.
//! The fourth moment is computed exactly as an integer; infiniteness is
//! semi-decided by the finiteness probe or, at `N ≥ 4` for prime `d`,
//! excluded by the classification of unitary 2-groups once the gates fail
//! the (basis-dependent) Clifford membership test.
//!
//! Verdicts carry their evidence and the caveats that apply to it. When the
//! available certificates cannot settle a register count, the verdict says
//! so instead of guessing.

pub mod clifford;
pub mod probe;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::gateset::{gamma_family, FamilyMode, GateSet};
use crate::moments::{exact_moment_with, frame_potential_mc, McOptions, MomentReport};
use crate::tensor::SubspaceOptions;
use crate::{Error, Limits, Result};
use clifford::{clifford_member_test, is_prime, CliffordReport};
use probe::{finiteness_probe, ProbeOptions, ProbeOutcome, ProbeReport};

/// The moment bound on the least universal register count:
/// `K(Γ) ≤ d⁴(n−1)+1`.
pub fn bound_new(d: u32, n: u32) -> Result<BigUint> {
    bound_with_exponent(d, n, 4)
}

/// The earlier eighth-moment bound `d⁸(n−1)+1`, kept for comparison.
pub fn bound_ivanyos(d: u32, n: u32) -> Result<BigUint> {
    bound_with_exponent(d, n, 8)
}

fn bound_with_exponent(d: u32, n: u32, e: u32) -> Result<BigUint> {
    if d < 2 || n < 1 {
        return Err(Error::InvalidHeader(format!(
            "bounds require d ≥ 2 and n ≥ 1, got d={d}, n={n}"
        )));
    }
    Ok(BigUint::from(d).pow(e) * BigUint::from(n - 1) + BigUint::from(1u32))
}

/// Final decision about a gate set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    /// Density at this register count certified by exact moment plus
    /// infiniteness evidence.
    UniversalAt { register_count: u32 },
    /// Universality from this register count on, concluded from the
    /// 2-group classification without a finiteness certificate.
    EventuallyUniversal { register_count: u32 },
    /// All gates lie in the Clifford group, the one infinite family of
    /// obstructions; no register count ever becomes universal.
    CliffordBlocked,
    /// Every register count up to the bound was excluded; the set is never
    /// universal.
    FiniteNonDesign,
    /// The evidence does not settle the question.
    NotDecided { reason: String },
}

impl Verdict {
    /// Whether the question was settled either way.
    pub fn is_decided(&self) -> bool {
        !matches!(self, Verdict::NotDecided { .. })
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::UniversalAt { register_count } => {
                write!(f, "universal at N = {register_count}")
            }
            Verdict::EventuallyUniversal { register_count } => {
                write!(f, "eventually universal with witness N = {register_count}")
            }
            Verdict::CliffordBlocked => write!(f, "Clifford-contained: never universal"),
            Verdict::FiniteNonDesign => {
                write!(f, "excluded at every register count up to the bound: never universal")
            }
            Verdict::NotDecided { reason } => write!(f, "not decided: {reason}"),
        }
    }
}

/// How one register count was resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "resolution")]
pub enum RegisterResolution {
    /// Fourth moment differs from 2: not universal at this count.
    NotDesign,
    /// Gates all pass Clifford membership: blocked at every count.
    CliffordBlocked,
    /// Moment 2 and the probe grew past its cap cleanly.
    DenseByProbe,
    /// Moment 2 at `N ≥ 4`, prime `d`, Clifford-negative: the
    /// classification leaves no finite option.
    DenseByClassification,
    /// Moment 2 but the probe enumerated a finite closure: not universal
    /// at this count.
    FiniteDesign,
    /// Evidence insufficient at this count.
    Undetermined { reason: String },
}

/// Evidence gathered at one register count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegisterAnalysis {
    pub register_count: u32,
    pub moment: Option<MomentReport>,
    pub clifford: Option<CliffordReport>,
    pub probe: Option<ProbeReport>,
    pub resolution: RegisterResolution,
}

impl RegisterAnalysis {
    /// The verdict this single register count supports on its own.
    pub fn verdict(&self) -> Verdict {
        let n = self.register_count;
        match &self.resolution {
            RegisterResolution::NotDesign => Verdict::NotDecided {
                reason: format!("fourth moment differs from 2 at N = {n}: not universal there"),
            },
            RegisterResolution::CliffordBlocked => Verdict::CliffordBlocked,
            RegisterResolution::DenseByProbe | RegisterResolution::DenseByClassification => {
                Verdict::UniversalAt { register_count: n }
            }
            RegisterResolution::FiniteDesign => Verdict::NotDecided {
                reason: format!("finite 2-design at N = {n}: not universal there"),
            },
            RegisterResolution::Undetermined { reason } => Verdict::NotDecided {
                reason: reason.clone(),
            },
        }
    }
}

/// Tuning for the decision engine.
#[derive(Debug, Clone)]
pub struct DecisionOptions {
    pub family_mode: FamilyMode,
    /// Cap on the scanned register count; `None` derives the largest count
    /// whose exact moment fits the resource limits.
    pub max_registers: Option<u32>,
    /// Master seed for all randomized components.
    pub seed: u64,
    pub probe: ProbeOptions,
    pub subspace: SubspaceOptions,
    /// When set, register counts whose exact moment is out of reach are
    /// estimated by Monte Carlo instead of skipped. Estimates never
    /// support a `FiniteNonDesign` conclusion.
    pub mc_fallback: Option<McOptions>,
}

impl Default for DecisionOptions {
    fn default() -> Self {
        DecisionOptions {
            family_mode: FamilyMode::SwapForm,
            max_registers: None,
            seed: 7,
            probe: ProbeOptions::default(),
            subspace: SubspaceOptions::default(),
            mc_fallback: None,
        }
    }
}

/// Outcome of a full eventual-universality scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: Verdict,
    /// `d⁴(n−1)+1`, decimal.
    pub bound_new: String,
    /// `d⁸(n−1)+1`, decimal.
    pub bound_ivanyos: String,
    /// Highest register count examined.
    pub scanned_to: u32,
    /// Whether the scan stopped below the bound for resource reasons.
    pub capped_below_bound: bool,
    pub caveats: Vec<String>,
    pub scanned: Vec<RegisterAnalysis>,
}

/// Resolve a single register count `N ≥ n`.
pub fn decide_at(
    gs: &GateSet,
    register_count: u32,
    opts: &DecisionOptions,
    limits: &Limits,
) -> Result<RegisterAnalysis> {
    let fam = gamma_family(gs, register_count, opts.family_mode, limits)?;
    let mut subspace = opts.subspace.clone();
    subspace.seed = opts.seed;

    // Exact moment when resources allow; optional Monte Carlo fallback.
    let moment = match exact_moment_with(&fam, 2, limits, &subspace) {
        Ok(rep) => rep,
        Err(Error::ResourceLimit { .. }) if opts.mc_fallback.is_some() => {
            let mut mc = opts.mc_fallback.clone().unwrap();
            mc.seed = opts.seed;
            frame_potential_mc(&fam, 2, &mc, limits)?
        }
        Err(Error::Inconclusive(reason)) => {
            return Ok(RegisterAnalysis {
                register_count,
                moment: None,
                clifford: None,
                probe: None,
                resolution: RegisterResolution::Undetermined {
                    reason: format!("moment computation inconclusive: {reason}"),
                },
            });
        }
        Err(e) => return Err(e),
    };

    let is_design = match (&moment.exact, &moment.estimate) {
        (Some(v), _) => *v == 2,
        (None, Some(est)) => (est.value - 2.0).abs() <= 3.0 * est.std_err,
        (None, None) => false,
    };
    if !is_design {
        return Ok(RegisterAnalysis {
            register_count,
            moment: Some(moment),
            clifford: None,
            probe: None,
            resolution: RegisterResolution::NotDesign,
        });
    }

    // Design at this count. Clifford containment blocks everything.
    let clifford = if is_prime(gs.d()) {
        Some(clifford_member_test(gs)?)
    } else {
        None
    };
    if clifford.as_ref().is_some_and(|c| c.all_clifford) {
        return Ok(RegisterAnalysis {
            register_count,
            moment: Some(moment),
            clifford,
            probe: None,
            resolution: RegisterResolution::CliffordBlocked,
        });
    }

    // Infiniteness: enumerate when dense-feasible. A concrete finite
    // enumeration outranks the classification shortcut.
    let dim = fam.dim()?;
    let probe = if dim <= limits.dense_threshold {
        Some(finiteness_probe(&fam, &opts.probe, limits)?)
    } else {
        None
    };
    let resolution = match probe.as_ref().map(|p| &p.outcome) {
        Some(ProbeOutcome::InfiniteLikely) => RegisterResolution::DenseByProbe,
        Some(ProbeOutcome::Finite { .. }) => RegisterResolution::FiniteDesign,
        Some(ProbeOutcome::Inconclusive { .. }) | None => {
            // Classification shortcut: at d^N ≥ 5 with N ≥ 4 and prime d,
            // a 2-design is Clifford-contained or dense; Clifford was
            // excluded above (in the computational basis).
            let clifford_negative = clifford.as_ref().is_some_and(|c| !c.all_clifford);
            if register_count >= 4 && clifford_negative {
                RegisterResolution::DenseByClassification
            } else {
                let reason = match &probe {
                    Some(p) => format!(
                        "2-design, but the finiteness probe was inconclusive ({:?}) and \
                         the classification shortcut needs N ≥ 4 (N = {register_count})",
                        p.outcome
                    ),
                    None => format!(
                        "2-design, but d^N = {dim} exceeds the dense probe limit and the \
                         classification shortcut does not apply at N = {register_count}"
                    ),
                };
                RegisterResolution::Undetermined { reason }
            }
        }
    };
    Ok(RegisterAnalysis {
        register_count,
        moment: Some(moment),
        clifford,
        probe,
        resolution,
    })
}

/// Largest register count whose exact fourth moment fits the limits.
fn exact_feasible_registers(d: u32, limits: &Limits) -> u32 {
    let mut n = 0u32;
    loop {
        let next = n + 1;
        match crate::tensor::checked_power(d as usize, 4 * next as usize) {
            Ok(dim) if dim <= limits.max_total_dim => n = next,
            _ => return n,
        }
    }
}

/// Scan register counts up to the bound and decide eventual universality.
pub fn decide_eventual(
    gs: &GateSet,
    opts: &DecisionOptions,
    limits: &Limits,
) -> Result<Decision> {
    let (d, n) = (gs.d(), gs.n());
    let bound = bound_new(d, n)?;
    let bound_iv = bound_ivanyos(d, n)?;

    let feasible = match opts.max_registers {
        Some(cap) => cap,
        None => exact_feasible_registers(d, limits),
    };
    let hi_big = BigUint::from(feasible).min(bound.clone());
    let capped = hi_big < bound;
    let hi: u32 = hi_big
        .try_into()
        .expect("scan bound fits u32 because the cap does");

    let mut scanned = Vec::new();
    let mut caveats: Vec<String> = Vec::new();
    let mut undetermined: Vec<u32> = Vec::new();
    let mut estimate_only: Vec<u32> = Vec::new();
    let mut scanned_to = 0u32;

    for register_count in n..=hi {
        let analysis = decide_at(gs, register_count, opts, limits)?;
        scanned_to = register_count;
        let resolution = analysis.resolution.clone();
        let used_estimate = analysis
            .moment
            .as_ref()
            .is_some_and(|m| m.exact.is_none());
        if used_estimate {
            estimate_only.push(register_count);
        }
        scanned.push(analysis);

        let finish = |verdict: Verdict, mut caveats: Vec<String>, scanned: Vec<RegisterAnalysis>| {
            if matches!(verdict, Verdict::UniversalAt { .. }) {
                caveats.push(
                    "infiniteness rests on probe evidence (growth past the cap with clean \
                     separation), which is a semi-decision, not a certificate"
                        .to_string(),
                );
            }
            if matches!(verdict, Verdict::EventuallyUniversal { .. }) {
                caveats.push(
                    "the Clifford exclusion backing the classification shortcut is tested in \
                     the computational basis only; a Clifford conjugate would evade it"
                        .to_string(),
                );
            }
            Ok(Decision {
                verdict,
                bound_new: bound.to_string(),
                bound_ivanyos: bound_iv.to_string(),
                scanned_to,
                capped_below_bound: capped,
                caveats,
                scanned,
            })
        };

        match resolution {
            RegisterResolution::CliffordBlocked => {
                return finish(Verdict::CliffordBlocked, caveats, scanned)
            }
            RegisterResolution::DenseByProbe => {
                if used_estimate {
                    caveats.push(format!(
                        "the design condition at N = {register_count} is Monte Carlo evidence, \
                         not an exact moment"
                    ));
                }
                return finish(
                    Verdict::UniversalAt { register_count },
                    caveats,
                    scanned,
                );
            }
            RegisterResolution::DenseByClassification => {
                if used_estimate {
                    caveats.push(format!(
                        "the design condition at N = {register_count} is Monte Carlo evidence, \
                         not an exact moment"
                    ));
                }
                return finish(
                    Verdict::EventuallyUniversal { register_count },
                    caveats,
                    scanned,
                );
            }
            RegisterResolution::FiniteDesign => {
                caveats.push(format!(
                    "exclusion at N = {register_count} relies on the probe's finite \
                     enumeration of a 2-design closure"
                ));
            }
            RegisterResolution::NotDesign => {}
            RegisterResolution::Undetermined { .. } => undetermined.push(register_count),
        }
    }

    let verdict = if capped {
        let reason = if hi < n {
            format!(
                "no register count is scannable: the cap {hi} lies below the gate arity {n}"
            )
        } else {
            format!(
                "scan stopped at N = {hi}, below the bound {bound}; no decision within resources"
            )
        };
        Verdict::NotDecided { reason }
    } else if !undetermined.is_empty() {
        Verdict::NotDecided {
            reason: format!(
                "register counts {undetermined:?} could not be resolved within the bound"
            ),
        }
    } else if !estimate_only.is_empty() {
        Verdict::NotDecided {
            reason: format!(
                "register counts {estimate_only:?} were excluded by Monte Carlo estimates \
                 only; a negative decision needs exact moments"
            ),
        }
    } else {
        // Every count up to the bound was excluded with exact evidence.
        Verdict::FiniteNonDesign
    };
    Ok(Decision {
        verdict,
        bound_new: bound.to_string(),
        bound_ivanyos: bound_iv.to_string(),
        scanned_to,
        capped_below_bound: capped,
        caveats,
        scanned,
    })
}
