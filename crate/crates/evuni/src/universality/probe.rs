//! Finiteness probing by breadth-first closure enumeration.
//!
//! The probe multiplies a frontier of known group elements by the
//! generators (closed under adjoints) and deduplicates against everything
//! seen, both strictly (Frobenius distance) and projectively (distance
//! after optimal global-phase alignment). It terminates `Finite` when the
//! frontier empties, `InfiniteLikely` when the element count passes the cap
//! while all pairwise comparisons stayed comfortably separated, and
//! `Inconclusive` otherwise — including whenever two compared elements came
//! within ten dedup-epsilons of each other, since a near-merge could have
//! closed the enumeration spuriously.
//!
//! Finiteness of a matrix group is not decidable from finite data; a
//! cap-bounded enumeration is a semi-decision and `InfiniteLikely` is
//! deliberately named as evidence, not proof.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::gateset::GeneratorFamily;
use crate::tensor::{frobenius_distance, phase_aligned_distance, CMat};
use crate::{Error, Limits, Result};

/// Tuning for [`finiteness_probe`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeOptions {
    /// Two elements within this Frobenius distance are identified.
    pub epsilon: f64,
    /// Maximum number of strict elements stored before giving up on
    /// termination.
    pub cap: usize,
    /// Maximum breadth-first generations.
    pub max_generations: usize,
    /// Memory budget for stored elements, in bytes.
    pub max_store_bytes: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            epsilon: 1e-6,
            cap: 10_000,
            max_generations: 64,
            max_store_bytes: 512 << 20,
        }
    }
}

/// Why the enumeration stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome")]
pub enum ProbeOutcome {
    /// The closure was fully enumerated.
    Finite {
        order: usize,
        projective_order: usize,
    },
    /// Growth passed the cap with clean separation everywhere.
    InfiniteLikely,
    /// Neither termination nor trustworthy growth.
    Inconclusive { reason: String },
}

/// One breadth-first generation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub new_elements: usize,
    pub total: usize,
}

/// Full probe result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeReport {
    pub outcome: ProbeOutcome,
    /// Strict (phase-sensitive) element count at stop.
    pub elements_found: usize,
    /// Projective class count at stop.
    pub projective_classes: usize,
    pub dedup_epsilon: f64,
    pub cap: usize,
    /// Smallest distance observed between distinct stored elements, when
    /// any two were compared.
    pub min_strict_distance: Option<f64>,
    pub min_projective_distance: Option<f64>,
    /// Merges that matched only coarsely (well above numerical noise yet
    /// within epsilon) — evidence that epsilon may be conflating genuinely
    /// distinct elements.
    pub suspicious_merges: usize,
    pub transcript: Vec<GenerationRecord>,
}

/// Bucketed element store. The fingerprint Σ|u_ij|⁴ is phase-invariant, so
/// one bucketing scheme serves both the strict and the projective
/// registries; candidates are only compared against elements whose
/// fingerprint could collide within tolerance.
struct Registry {
    items: Vec<CMat>,
    buckets: HashMap<i64, Vec<usize>>,
    width: f64,
    epsilon: f64,
    /// A merge at distance above this (yet within epsilon) is recorded as
    /// suspicious: genuine re-derivations of one element agree to within
    /// accumulated rounding, far below this floor.
    noise_floor: f64,
    projective: bool,
    min_distance: Option<f64>,
    suspicious_merges: usize,
}

impl Registry {
    fn new(dim: usize, epsilon: f64, projective: bool) -> Self {
        // |fp(a) − fp(b)| ≤ 4·dim·‖a−b‖_F, so this width guarantees that
        // ε-close pairs land within one bucket of each other.
        Registry {
            items: Vec::new(),
            buckets: HashMap::new(),
            width: 8.0 * dim as f64 * epsilon,
            epsilon,
            noise_floor: f64::max(1e-10, 1e-3 * epsilon),
            projective,
            min_distance: None,
            suspicious_merges: 0,
        }
    }

    fn fingerprint(m: &CMat) -> f64 {
        m.iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum()
    }

    fn distance(&self, a: &CMat, b: &CMat) -> f64 {
        if self.projective {
            phase_aligned_distance(a, b)
        } else {
            frobenius_distance(a, b)
        }
    }

    /// Index of a match, or a fresh index after insertion.
    fn insert_or_find(&mut self, m: CMat) -> (usize, bool) {
        let key = (Self::fingerprint(&m) / self.width).floor() as i64;
        for k in [key - 1, key, key + 1] {
            if let Some(bucket) = self.buckets.get(&k) {
                for &idx in bucket {
                    let dist = self.distance(&self.items[idx], &m);
                    if dist <= self.epsilon {
                        if dist > self.noise_floor {
                            self.suspicious_merges += 1;
                        }
                        return (idx, false);
                    }
                    self.min_distance = Some(match self.min_distance {
                        Some(cur) if cur <= dist => cur,
                        _ => dist,
                    });
                }
            }
        }
        let idx = self.items.len();
        self.items.push(m);
        self.buckets.entry(key).or_default().push(idx);
        (idx, true)
    }

    fn bytes(&self) -> usize {
        self.items
            .first()
            .map(|m| self.items.len() * m.len() * 16)
            .unwrap_or(0)
    }
}

/// Enumerate the closure of `fam.members ∪ adjoints` from the identity.
pub fn finiteness_probe(
    fam: &GeneratorFamily,
    opts: &ProbeOptions,
    limits: &Limits,
) -> Result<ProbeReport> {
    let dim = fam.dim()?;
    if dim > limits.dense_threshold {
        return Err(Error::ResourceLimit {
            what: "finiteness probe (dense-only)".to_string(),
            requested: dim,
            limit: limits.dense_threshold,
        });
    }
    let mut gens: Vec<CMat> = Vec::new();
    for member in &fam.members {
        for op in [member.clone(), member.adjoint()] {
            let dense = op.to_dense(limits)?;
            if !gens
                .iter()
                .any(|g| frobenius_distance(g, &dense) <= opts.epsilon)
            {
                gens.push(dense);
            }
        }
    }

    let mut strict = Registry::new(dim, opts.epsilon, false);
    let mut projective = Registry::new(dim, opts.epsilon, true);
    let (identity_idx, _) = strict.insert_or_find(CMat::eye(dim));
    projective.insert_or_find(CMat::eye(dim));
    let mut frontier = vec![identity_idx];
    let mut transcript = Vec::new();

    let separation_floor = 10.0 * opts.epsilon;
    let finish = |strict: &Registry,
                  projective: &Registry,
                  outcome: ProbeOutcome,
                  transcript: Vec<GenerationRecord>| {
        // Distinct elements too close to the dedup threshold, or merges far
        // above numerical noise, mean epsilon cannot be separating reliably;
        // no outcome computed under those conditions is trustworthy.
        let near_collision = [strict.min_distance, projective.min_distance]
            .iter()
            .flatten()
            .any(|&d| d <= separation_floor);
        let suspicious = strict.suspicious_merges + projective.suspicious_merges;
        let outcome = if near_collision || suspicious > 0 {
            ProbeOutcome::Inconclusive {
                reason: format!(
                    "dedup at epsilon {} saw {} coarse merges and a minimum \
                     distinct-pair distance of {:?}; elements cannot be \
                     distinguished reliably",
                    strict.epsilon, suspicious, strict.min_distance
                ),
            }
        } else {
            outcome
        };
        Ok(ProbeReport {
            outcome,
            elements_found: strict.items.len(),
            projective_classes: projective.items.len(),
            dedup_epsilon: strict.epsilon,
            cap: opts.cap,
            min_strict_distance: strict.min_distance,
            min_projective_distance: projective.min_distance,
            suspicious_merges: suspicious,
            transcript,
        })
    };

    for generation in 1..=opts.max_generations {
        let mut next = Vec::new();
        for &w_idx in &frontier {
            for g in &gens {
                let v = g.dot(&strict.items[w_idx]);
                let (idx, is_new) = strict.insert_or_find(v);
                if is_new {
                    projective.insert_or_find(strict.items[idx].clone());
                    next.push(idx);
                }
                if strict.items.len() > opts.cap {
                    transcript.push(GenerationRecord {
                        generation,
                        new_elements: next.len(),
                        total: strict.items.len(),
                    });
                    return finish(&strict, &projective, ProbeOutcome::InfiniteLikely, transcript);
                }
                if strict.bytes() + projective.bytes() > opts.max_store_bytes {
                    transcript.push(GenerationRecord {
                        generation,
                        new_elements: next.len(),
                        total: strict.items.len(),
                    });
                    return finish(
                        &strict,
                        &projective,
                        ProbeOutcome::Inconclusive {
                            reason: "element storage exceeded the byte budget".to_string(),
                        },
                        transcript,
                    );
                }
            }
        }
        transcript.push(GenerationRecord {
            generation,
            new_elements: next.len(),
            total: strict.items.len(),
        });
        if next.is_empty() {
            let outcome = ProbeOutcome::Finite {
                order: strict.items.len(),
                projective_order: projective.items.len(),
            };
            return finish(&strict, &projective, outcome, transcript);
        }
        frontier = next;
    }
    finish(
        &strict,
        &projective,
        ProbeOutcome::Inconclusive {
            reason: format!(
                "no termination within {} generations",
                opts.max_generations
            ),
        },
        transcript,
    )
}
