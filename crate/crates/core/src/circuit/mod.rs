//! Time-ordered gate sequences.
//!
//! `ops[0]` acts first. The product is reversed only inside [`Circuit::evaluate`]:
//! a circuit `[A, B, C]` evaluates to the matrix `C·B·A`.

mod format;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use self::format::{parse, serialize, CIRCUIT_FILE_EXTENSION};
use crate::error::{Error, Result};
use crate::gates::{gate_matrix, GateOp};
use crate::tensor::{check_qubits, phase_alignment, raw_distance, ComplexMatrix};

pub const MAX_QUBITS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<GateOp>,
    pub name: Option<String>,
    pub metadata: BTreeMap<String, String>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCount(n_qubits));
        }
        Ok(Self { n_qubits, ops: Vec::new(), name: None, metadata: BTreeMap::new() })
    }

    pub fn from_ops(n_qubits: usize, ops: impl IntoIterator<Item = GateOp>) -> Result<Self> {
        let mut c = Self::new(n_qubits)?;
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate()?;
        check_qubits(&op.qubits, self.n_qubits)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `self` followed in time by `next`.
    pub fn then(&self, next: &Circuit) -> Result<Circuit> {
        if self.n_qubits != next.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: next.n_qubits });
        }
        let mut out = self.clone();
        out.ops.extend(next.ops.iter().cloned());
        Ok(out)
    }

    pub fn evaluate(&self) -> Result<ComplexMatrix> {
        let n = self.n_qubits;
        let mut u = ComplexMatrix::identity(1 << n);
        for op in &self.ops {
            let m = gate_matrix(op, n)?;
            u = m.matmul(&u)?;
        }
        Ok(u)
    }

    pub fn verify(&self, target: &ComplexMatrix, tol: f64) -> Result<VerificationReport> {
        let u = self.evaluate()?;
        VerificationReport::compare(&u, target, tol)
    }

    pub fn entangler_count(&self) -> usize {
        self.ops.iter().filter(|op| op.kind.is_entangler()).count()
    }

    pub fn count_where(&self, pred: impl Fn(&GateOp) -> bool) -> usize {
        self.ops.iter().filter(|op| pred(op)).count()
    }

    /// Greedy left-packed layering: each op goes into the earliest layer after
    /// every earlier op sharing a qubit. Returns op indices per layer.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut ready = vec![0usize; self.n_qubits];
        let mut layers: Vec<Vec<usize>> = Vec::new();
        for (i, op) in self.ops.iter().enumerate() {
            let layer = op.qubits.iter().map(|&q| ready[q]).max().unwrap_or(0);
            if layers.len() <= layer {
                layers.resize_with(layer + 1, Vec::new);
            }
            layers[layer].push(i);
            for &q in &op.qubits {
                ready[q] = layer + 1;
            }
        }
        layers
    }

    /// Layers of the greedy packing that contain at least one single-qubit
    /// phase gate (the T-depth of the circuit).
    pub fn phase_groups(&self) -> Vec<Vec<usize>> {
        self.layers()
            .into_iter()
            .map(|layer| {
                layer.into_iter().filter(|&i| self.ops[i].kind.is_phase_gate()).collect::<Vec<_>>()
            })
            .filter(|g| !g.is_empty())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub aligned_distance: f64,
    pub raw_distance: f64,
    pub passed: bool,
    pub aligning_phase: f64,
    pub tolerance: f64,
}

impl VerificationReport {
    /// Compares an implemented unitary against a target.
    pub fn compare(actual: &ComplexMatrix, target: &ComplexMatrix, tol: f64) -> Result<Self> {
        let raw = raw_distance(actual, target)?;
        let aligned = phase_alignment(actual, target)?;
        Ok(Self {
            aligned_distance: aligned.distance,
            raw_distance: raw,
            passed: aligned.distance < tol,
            aligning_phase: aligned.phase,
            tolerance: tol,
        })
    }
}
