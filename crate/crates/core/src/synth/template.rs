//! Circuits whose gate angles are affine in a parameter vector.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gates::{gate_matrix, zz_sum_diagonal, GateKind, GateOp};
use crate::tensor::{check_qubits, qubit_mask, ComplexMatrix, C64, ONE, ZERO};

/// Where an op's angle comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleSlot {
    /// The op keeps its own angle (or has none).
    Fixed,
    /// `angle = scale * params[index]`.
    Free { index: usize, scale: f64 },
}

/// How one op acts on the register; used for cheap in-place products.
#[derive(Debug, Clone)]
enum Action {
    Local { mask: usize, m: [C64; 4] },
    Diagonal(Vec<C64>),
    Dense(ComplexMatrix),
}

/// `dM/da = K M` for a free op.
#[derive(Debug, Clone)]
enum Generator {
    Local { mask: usize, k: [C64; 4] },
    Diagonal(Vec<C64>),
}

#[derive(Debug, Clone)]
struct Slot {
    op: GateOp,
    angle: AngleSlot,
    /// Real ZZ spectrum for diagonal entanglers, `angle * spectrum` is the phase.
    spectrum: Option<Vec<f64>>,
    fixed_action: Option<Action>,
}

#[derive(Debug, Clone)]
pub struct Template {
    n_qubits: usize,
    n_params: usize,
    slots: Vec<Slot>,
}

fn local_2x2(op: &GateOp) -> Result<[C64; 4]> {
    let mut single = op.clone();
    single.qubits = vec![0];
    let m = gate_matrix(&single, 1)?;
    Ok([m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
}

impl Template {
    pub fn new(n_qubits: usize) -> Result<Self> {
        Circuit::new(n_qubits)?;
        Ok(Self { n_qubits, n_params: 0, slots: Vec::new() })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn push_fixed(&mut self, op: GateOp) -> Result<()> {
        op.validate()?;
        check_qubits(&op.qubits, self.n_qubits)?;
        let action = if op.qubits.len() == 1 {
            Action::Local { mask: qubit_mask(op.qubits[0], self.n_qubits), m: local_2x2(&op)? }
        } else {
            let m = gate_matrix(&op, self.n_qubits)?;
            if m.is_diagonal(0.0) {
                Action::Diagonal(m.diagonal())
            } else {
                Action::Dense(m)
            }
        };
        self.slots.push(Slot { op, angle: AngleSlot::Fixed, spectrum: None, fixed_action: Some(action) });
        Ok(())
    }

    /// Adds `op` with its angle bound to `scale * params[index]`. Only pulses,
    /// phases and diagonal entanglers can be free.
    pub fn push_free(&mut self, mut op: GateOp, index: usize, scale: f64) -> Result<()> {
        if op.angle.is_none() {
            op.angle = Some(0.0);
        }
        op.validate()?;
        check_qubits(&op.qubits, self.n_qubits)?;
        if !scale.is_finite() {
            return Err(Error::NonFinite);
        }
        let spectrum = match op.kind {
            GateKind::Pulse | GateKind::Phase => None,
            _ => {
                let weights = op.zz_weights().ok_or_else(|| Error::MalformedGate {
                    kind: op.kind,
                    reason: "angle cannot be a free parameter".into(),
                })?;
                let global: Vec<_> =
                    weights.iter().map(|&(a, b, w)| (op.qubits[a], op.qubits[b], w)).collect();
                Some(zz_sum_diagonal(&global, self.n_qubits))
            }
        };
        self.n_params = self.n_params.max(index + 1);
        self.slots.push(Slot { op, angle: AngleSlot::Free { index, scale }, spectrum, fixed_action: None });
        Ok(())
    }

    /// Slots in time order.
    pub fn slots(&self) -> impl Iterator<Item = (&GateOp, AngleSlot)> {
        self.slots.iter().map(|s| (&s.op, s.angle))
    }

    fn check_len(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::DimensionMismatch { left: self.n_params, right: params.len() });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    fn angle_of(slot: &Slot, params: &[f64]) -> Option<f64> {
        match slot.angle {
            AngleSlot::Fixed => slot.op.angle,
            AngleSlot::Free { index, scale } => Some(scale * params[index]),
        }
    }

    fn action(&self, slot: &Slot, params: &[f64]) -> Action {
        if let Some(a) = &slot.fixed_action {
            return a.clone();
        }
        let angle = Self::angle_of(slot, params).unwrap_or(0.0);
        let mask = || qubit_mask(slot.op.qubits[0], self.n_qubits);
        match (&slot.spectrum, slot.op.kind) {
            (Some(spec), _) => Action::Diagonal(spec.iter().map(|&h| C64::from_polar(1.0, angle * h)).collect()),
            (None, GateKind::Pulse) => {
                let (c, s) = ((0.5 * angle).cos(), (0.5 * angle).sin());
                let mi = C64::new(0.0, -s);
                Action::Local { mask: mask(), m: [C64::new(c, 0.0), mi, mi, C64::new(c, 0.0)] }
            }
            (None, _) => Action::Local {
                mask: mask(),
                m: [C64::from_polar(1.0, -angle), ZERO, ZERO, C64::from_polar(1.0, angle)],
            },
        }
    }

    fn generator(&self, slot: &Slot) -> Generator {
        let mask = || qubit_mask(slot.op.qubits[0], self.n_qubits);
        match (&slot.spectrum, slot.op.kind) {
            (Some(spec), _) => Generator::Diagonal(spec.iter().map(|&h| C64::new(0.0, h)).collect()),
            (None, GateKind::Pulse) => {
                let h = C64::new(0.0, -0.5);
                Generator::Local { mask: mask(), k: [ZERO, h, h, ZERO] }
            }
            (None, _) => Generator::Local { mask: mask(), k: [C64::new(0.0, -1.0), ZERO, ZERO, C64::new(0.0, 1.0)] },
        }
    }

    /// Concrete circuit at `params`. With `prune`, free single-qubit ops whose
    /// angle is below `1e-9` in magnitude are dropped.
    pub fn instantiate(&self, params: &[f64], prune: bool) -> Result<Circuit> {
        self.check_len(params)?;
        let mut c = Circuit::new(self.n_qubits)?;
        for slot in &self.slots {
            let mut op = slot.op.clone();
            if let AngleSlot::Free { .. } = slot.angle {
                let a = Self::angle_of(slot, params).unwrap_or(0.0);
                if prune && op.qubits.len() == 1 && a.abs() < 1e-9 {
                    continue;
                }
                op.angle = Some(a);
            }
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn evaluate(&self, params: &[f64]) -> Result<ComplexMatrix> {
        self.check_len(params)?;
        let d = self.dim();
        let mut u = identity(d);
        for slot in &self.slots {
            apply_left(&self.action(slot, params), &mut u, d);
        }
        ComplexMatrix::from_row_major(d, u)
    }

    /// `U(params)` and `∂U/∂params[i]` for every parameter.
    pub fn evaluate_with_jacobian(&self, params: &[f64]) -> Result<(ComplexMatrix, Vec<ComplexMatrix>)> {
        self.check_len(params)?;
        let d = self.dim();
        let actions: Vec<Action> = self.slots.iter().map(|s| self.action(s, params)).collect();
        // prefix[k] = M_k ... M_1 (after slot k)
        let mut prefix = Vec::with_capacity(actions.len());
        let mut u = identity(d);
        for a in &actions {
            apply_left(a, &mut u, d);
            prefix.push(u.clone());
        }
        let mut grads = vec![vec![ZERO; d * d]; self.n_params];
        // suffix = M_last ... M_{k+1}, built backwards
        let mut suffix = identity(d);
        let mut scratch = vec![ZERO; d * d];
        for k in (0..actions.len()).rev() {
            let slot = &self.slots[k];
            if let AngleSlot::Free { index, scale } = slot.angle {
                scratch.copy_from_slice(&prefix[k]);
                apply_generator(&self.generator(slot), &mut scratch, d);
                accumulate_product(&suffix, &scratch, scale, &mut grads[index], d);
            }
            apply_right(&actions[k], &mut suffix, d);
        }
        let grads = grads.into_iter().map(|g| ComplexMatrix::from_row_major(d, g)).collect::<Result<_>>()?;
        Ok((ComplexMatrix::from_row_major(d, u)?, grads))
    }
}

fn identity(d: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d * d];
    for i in 0..d {
        v[i * d + i] = ONE;
    }
    v
}

fn apply_left(a: &Action, x: &mut [C64], d: usize) {
    match a {
        Action::Local { mask, m } => left_local(*mask, m, x, d),
        Action::Diagonal(diag) => {
            for (i, row) in x.chunks_mut(d).enumerate() {
                row.iter_mut().for_each(|z| *z *= diag[i]);
            }
        }
        Action::Dense(m) => {
            let out = dense_mul(m.as_slice(), x, d);
            x.copy_from_slice(&out);
        }
    }
}

fn apply_right(a: &Action, x: &mut [C64], d: usize) {
    match a {
        Action::Local { mask, m } => {
            for row in x.chunks_mut(d) {
                for j0 in (0..d).filter(|j| j & mask == 0) {
                    let j1 = j0 | mask;
                    let (a0, a1) = (row[j0], row[j1]);
                    row[j0] = a0 * m[0] + a1 * m[2];
                    row[j1] = a0 * m[1] + a1 * m[3];
                }
            }
        }
        Action::Diagonal(diag) => {
            for row in x.chunks_mut(d) {
                row.iter_mut().zip(diag).for_each(|(z, g)| *z *= g);
            }
        }
        Action::Dense(m) => {
            let out = dense_mul(x, m.as_slice(), d);
            x.copy_from_slice(&out);
        }
    }
}

fn apply_generator(g: &Generator, x: &mut [C64], d: usize) {
    match g {
        Generator::Local { mask, k } => left_local(*mask, k, x, d),
        Generator::Diagonal(diag) => {
            for (i, row) in x.chunks_mut(d).enumerate() {
                row.iter_mut().for_each(|z| *z *= diag[i]);
            }
        }
    }
}

fn left_local(mask: usize, m: &[C64; 4], x: &mut [C64], d: usize) {
    for i0 in (0..d).filter(|i| i & mask == 0) {
        let i1 = i0 | mask;
        for j in 0..d {
            let (a0, a1) = (x[i0 * d + j], x[i1 * d + j]);
            x[i0 * d + j] = m[0] * a0 + m[1] * a1;
            x[i1 * d + j] = m[2] * a0 + m[3] * a1;
        }
    }
}

fn dense_mul(a: &[C64], b: &[C64], d: usize) -> Vec<C64> {
    let mut out = vec![ZERO; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == ZERO {
                continue;
            }
            let (brow, orow) = (&b[k * d..(k + 1) * d], &mut out[i * d..(i + 1) * d]);
            orow.iter_mut().zip(brow).for_each(|(o, bv)| *o += aik * bv);
        }
    }
    out
}

/// `out += scale * a b`.
fn accumulate_product(a: &[C64], b: &[C64], scale: f64, out: &mut [C64], d: usize) {
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k] * scale;
            if aik == ZERO {
                continue;
            }
            let (brow, orow) = (&b[k * d..(k + 1) * d], &mut out[i * d..(i + 1) * d]);
            orow.iter_mut().zip(brow).for_each(|(o, bv)| *o += aik * bv);
        }
    }
}
