//! Analysis reports: content digests, timings, and the JSON shape the
//! CLI emits. Reports are reproducible byte-for-byte from the same
//! input, seed, and tool version, except for the wall-clock timing block.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::universality::{Decision, RegisterAnalysis, Verdict};

/// Hex SHA-256 of raw bytes, used to fingerprint input files.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Wall-clock timings; excluded from reproducibility comparisons.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: u128,
}

/// The full machine-readable result of an eventual-universality analysis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool_version: String,
    /// SHA-256 of the input gate-set file bytes.
    pub input_digest: String,
    pub seed: u64,
    pub family_mode: String,
    /// `d⁴(n−1)+1`, decimal.
    pub bound_new: String,
    /// `d⁸(n−1)+1`, decimal.
    pub bound_ivanyos: String,
    pub verdict: Verdict,
    pub scanned_to: u32,
    pub capped_below_bound: bool,
    pub caveats: Vec<String>,
    pub scanned: Vec<RegisterAnalysis>,
    pub timings: Timings,
}

impl AnalysisReport {
    /// Assemble a report from a finished decision.
    pub fn new(
        input_digest: String,
        seed: u64,
        family_mode: &str,
        decision: Decision,
        timings: Timings,
    ) -> Self {
        AnalysisReport {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input_digest,
            seed,
            family_mode: family_mode.to_string(),
            bound_new: decision.bound_new,
            bound_ivanyos: decision.bound_ivanyos,
            verdict: decision.verdict,
            scanned_to: decision.scanned_to,
            capped_below_bound: decision.capped_below_bound,
            caveats: decision.caveats,
            scanned: decision.scanned,
            timings,
        }
    }

    /// Whether the verdict settles the question (drives the exit code).
    pub fn decided(&self) -> bool {
        self.verdict.is_decided()
    }
}
