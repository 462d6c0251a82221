//! Gate sets: the JSON interchange format, normalization at load, and
//! generator families on enlarged registers.
//!
//! # File format
//!
//! ```json
//! {
//!   "d": 2,
//!   "n": 1,
//!   "gates": [
//!     { "label": "H", "matrix": [[[0.7071, 0.0], [0.7071, 0.0]],
//!                                 [[0.7071, 0.0], [-0.7071, 0.0]]] }
//!   ]
//! }
//! ```
//!
//! `d` is the local (qudit) dimension, `n` the number of qudits each gate
//! acts on, and each matrix is row-major with `[re, im]` entries of size
//! `d^n × d^n`.
//!
//! # Normalization
//!
//! Loading validates unitarity (Frobenius defect of `U†U` at most `1e-10`)
//! and rescales every gate to determinant 1, recording the applied phase.
//! Special-unitary representatives make infinite-order behavior visible to
//! the finiteness probe (a projectively finite determinant-1 group is
//! finite) without changing anything phase-insensitive, such as moments.
//!
//! The loaded set is then closed under inverses: whenever no stored gate
//! equals `g†` entrywise (within `1e-10` Frobenius), the adjoint is
//! appended with a `†` suffix on its label. Closure is deliberately strict
//! rather than up-to-phase — a determinant-1 representative of a
//! self-inverse gate generally differs from its adjoint by a root of unity,
//! and downstream consumers (random walks, averaged operators) want the
//! literal adjoint available.

use std::sync::Arc;

use ndarray_linalg::Determinant;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::tensor::{
    frobenius_distance, CMat, QuditPermutation, TensorWordOperator, Unitary, UNITARY_TOL,
};
use crate::{Error, Limits, Result};

/// Tolerance on `| |det U| − 1 |` before determinant normalization.
pub const DET_MODULUS_TOL: f64 = 1e-8;

/// Serialized form of a gate set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateSetFile {
    pub d: u32,
    pub n: u32,
    pub gates: Vec<GateEntry>,
}

/// One serialized gate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateEntry {
    #[serde(default)]
    pub label: String,
    /// Row-major `[re, im]` entries.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

/// A gate after validation and determinant-1 normalization.
#[derive(Debug, Clone)]
pub struct Gate {
    pub label: String,
    pub unitary: Arc<Unitary>,
    /// Scalar the raw matrix was multiplied by to reach determinant 1.
    pub phase: C64,
}

/// A validated, normalized, inverse-closed gate set.
#[derive(Debug, Clone)]
pub struct GateSet {
    d: u32,
    n: u32,
    gates: Vec<Gate>,
}

impl GateSet {
    /// Local dimension.
    pub fn d(&self) -> u32 {
        self.d
    }

    /// Qudits per gate.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `d^n`.
    pub fn dim(&self) -> usize {
        (self.d as usize).pow(self.n)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Build a gate set from raw matrices, running the same validation and
    /// normalization pipeline as [`load_gateset`].
    pub fn from_matrices(
        d: u32,
        n: u32,
        gates: impl IntoIterator<Item = (String, CMat)>,
        limits: &Limits,
    ) -> Result<GateSet> {
        let dim = header_dim(d, n, limits)?;
        let mut normalized = Vec::new();
        for (label, mat) in gates {
            normalized.push(normalize_gate(label, mat, dim)?);
        }
        close_under_inverses(&mut normalized);
        Ok(GateSet {
            d,
            n,
            gates: normalized,
        })
    }

    /// Serialize to the interchange format (normalized matrices).
    pub fn to_file(&self) -> GateSetFile {
        GateSetFile {
            d: self.d,
            n: self.n,
            gates: self
                .gates
                .iter()
                .map(|g| GateEntry {
                    label: g.label.clone(),
                    matrix: matrix_to_rows(g.unitary.matrix()),
                })
                .collect(),
        }
    }

    /// JSON text of [`GateSet::to_file`].
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("gate-set serialization is infallible")
    }
}

/// Parse, validate, normalize, and inverse-close a gate set from JSON text.
pub fn load_gateset(text: &str, limits: &Limits) -> Result<GateSet> {
    let file: GateSetFile = serde_json::from_str(text)?;
    let dim = header_dim(file.d, file.n, limits)?;
    let mut gates = Vec::with_capacity(file.gates.len());
    for (idx, entry) in file.gates.into_iter().enumerate() {
        let label = if entry.label.is_empty() {
            format!("g{idx}")
        } else {
            entry.label
        };
        let rows = entry.matrix.len();
        let cols = entry.matrix.iter().map(Vec::len).max().unwrap_or(0);
        let ragged = entry.matrix.iter().any(|r| r.len() != cols);
        if rows != dim || cols != dim || ragged {
            return Err(Error::DimensionMismatch {
                label,
                expected: dim,
                rows,
                cols,
            });
        }
        let mut mat = CMat::zeros((dim, dim));
        for (i, row) in entry.matrix.iter().enumerate() {
            for (j, &[re, im]) in row.iter().enumerate() {
                mat[(i, j)] = C64::new(re, im);
            }
        }
        gates.push(normalize_gate(label, mat, dim)?);
    }
    close_under_inverses(&mut gates);
    Ok(GateSet {
        d: file.d,
        n: file.n,
        gates,
    })
}

fn header_dim(d: u32, n: u32, limits: &Limits) -> Result<usize> {
    if d < 2 {
        return Err(Error::InvalidHeader(format!(
            "local dimension d must be at least 2, got {d}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidHeader(format!(
            "gate arity n must be at least 1, got {n}"
        )));
    }
    // Multiply with an early bail so absurd headers cannot spin or
    // overflow; d ≥ 2 bounds the loop by log2 of the cap.
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = dim.saturating_mul(d as usize);
        if dim > limits.max_total_dim {
            return Err(Error::ResourceLimit {
                what: format!("gate dimension {d}^{n}"),
                requested: dim,
                limit: limits.max_total_dim,
            });
        }
    }
    if dim > limits.dense_threshold {
        return Err(Error::ResourceLimit {
            what: format!("dense gate matrices of dimension {d}^{n}"),
            requested: dim,
            limit: limits.dense_threshold,
        });
    }
    Ok(dim)
}

fn normalize_gate(label: String, mat: CMat, dim: usize) -> Result<Gate> {
    if mat.nrows() != dim || mat.ncols() != dim {
        return Err(Error::DimensionMismatch {
            label,
            expected: dim,
            rows: mat.nrows(),
            cols: mat.ncols(),
        });
    }
    let unitary = Unitary::new(mat, UNITARY_TOL, &label)?;
    let det = unitary.matrix().det().map_err(|_| Error::NonUnitary {
        label: label.clone(),
        defect: f64::NAN,
        tol: DET_MODULUS_TOL,
    })?;
    let modulus_defect = (det.norm() - 1.0).abs();
    // A NaN defect must be rejected, so direct `> tol` is not enough.
    if modulus_defect.is_nan() || modulus_defect > DET_MODULUS_TOL {
        return Err(Error::NonUnitary {
            label,
            defect: modulus_defect,
            tol: DET_MODULUS_TOL,
        });
    }
    // phase = det^{-1/dim} via polar decomposition, principal argument.
    let (r, theta) = det.to_polar();
    let phase = C64::from_polar(r.powf(-1.0 / dim as f64), -theta / dim as f64);
    let mat = unitary.into_matrix().mapv(|z| z * phase);
    Ok(Gate {
        unitary: Arc::new(Unitary::new(mat, 10.0 * UNITARY_TOL, &label)?),
        label,
        phase,
    })
}

fn close_under_inverses(gates: &mut Vec<Gate>) {
    let original = gates.len();
    for i in 0..original {
        let adj = gates[i].unitary.adjoint();
        let present = gates
            .iter()
            .any(|g| frobenius_distance(g.unitary.matrix(), adj.matrix()) <= UNITARY_TOL);
        if !present {
            let label = format!("{}†", gates[i].label);
            let phase = gates[i].phase.conj();
            gates.push(Gate {
                label,
                unitary: Arc::new(adj),
                phase,
            });
        }
    }
}

fn matrix_to_rows(mat: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..mat.nrows())
        .map(|i| (0..mat.ncols()).map(|j| [mat[(i, j)].re, mat[(i, j)].im]).collect())
        .collect()
}

/// How a gate set is promoted to `N` registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyMode {
    /// One embedded copy of every gate per ordered target tuple.
    FullOrbit,
    /// Gates embedded once on the first `n` registers, plus adjacent
    /// transpositions. Generates the same closure density as the full
    /// orbit while keeping the generator count linear in `N`.
    SwapForm,
}

/// A gate set promoted to a register of `N` qudits.
#[derive(Debug, Clone)]
pub struct GeneratorFamily {
    pub base: GateSet,
    pub register_count: u32,
    pub mode: FamilyMode,
    pub members: Vec<TensorWordOperator>,
    pub member_labels: Vec<String>,
}

impl GeneratorFamily {
    /// `d^N`.
    pub fn dim(&self) -> Result<usize> {
        crate::tensor::checked_power(self.base.d() as usize, self.register_count as usize)
    }
}

/// Promote `gs` to `N ≥ n` registers.
pub fn gamma_family(gs: &GateSet, register_count: u32, mode: FamilyMode, limits: &Limits) -> Result<GeneratorFamily> {
    let n = gs.n() as usize;
    let big_n = register_count as usize;
    if big_n < n {
        return Err(Error::InvalidTargets(format!(
            "register count {big_n} is smaller than the gate arity {n}"
        )));
    }
    let d = gs.d() as usize;
    let dim = crate::tensor::checked_power(d, big_n)?;
    limits.check_total_dim("generator family", dim)?;

    let mut members = Vec::new();
    let mut member_labels = Vec::new();
    match mode {
        FamilyMode::SwapForm => {
            for gate in gs.gates() {
                members.push(TensorWordOperator::from_gate(
                    d,
                    big_n,
                    Arc::clone(&gate.unitary),
                    (0..n).collect(),
                )?);
                member_labels.push(gate.label.clone());
            }
            for i in 0..big_n.saturating_sub(1) {
                let p = QuditPermutation::transposition(d, big_n, i, i + 1)?;
                members.push(TensorWordOperator::from_permutation(p));
                member_labels.push(format!("swap({},{})", i, i + 1));
            }
        }
        FamilyMode::FullOrbit => {
            for gate in gs.gates() {
                for tuple in ordered_tuples(big_n, n) {
                    members.push(TensorWordOperator::from_gate(
                        d,
                        big_n,
                        Arc::clone(&gate.unitary),
                        tuple.clone(),
                    )?);
                    member_labels.push(format!("{}@{:?}", gate.label, tuple));
                }
            }
        }
    }
    Ok(GeneratorFamily {
        base: gs.clone(),
        register_count,
        mode,
        members,
        member_labels,
    })
}

/// All ordered tuples of `len` distinct values drawn from `0..n`, in
/// lexicographic order.
fn ordered_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    fn rec(n: usize, len: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == len {
            out.push(current.clone());
            return;
        }
        for v in 0..n {
            if !current.contains(&v) {
                current.push(v);
                rec(n, len, current, out);
                current.pop();
            }
        }
    }
    rec(n, len, &mut current, &mut out);
    out
}
