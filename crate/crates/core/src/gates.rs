//! Named gates and their matrices.
//!
//! Local pulses are x rotations `Pulse(θ) = exp(-i θ/2 σx)` and local phases
//! are `Phase(φ) = exp(-i φ σz)`. Entanglers are diagonal ZZ-type gates built
//! by enumerating spin signs rather than by exponentiation.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{check_qubits, embed, spin_sign, ComplexMatrix, C64, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    PauliX,
    PauliY,
    PauliZ,
    Hadamard,
    S,
    T,
    /// Adjoint of [`GateKind::T`].
    Tdg,
    SqrtNot,
    Pulse,
    Phase,
    #[serde(rename = "CNOT")]
    Cnot,
    CPhase,
    /// Single-pair Ising coupling `exp(i φ σz σz)`.
    PairZZ,
    GlobalG,
    GlobalGG,
    NearestN,
    CouplingU,
}

impl GateKind {
    pub const ALL: [GateKind; 17] = [
        GateKind::PauliX,
        GateKind::PauliY,
        GateKind::PauliZ,
        GateKind::Hadamard,
        GateKind::S,
        GateKind::T,
        GateKind::Tdg,
        GateKind::SqrtNot,
        GateKind::Pulse,
        GateKind::Phase,
        GateKind::Cnot,
        GateKind::CPhase,
        GateKind::PairZZ,
        GateKind::GlobalG,
        GateKind::GlobalGG,
        GateKind::NearestN,
        GateKind::CouplingU,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::PauliX => "PauliX",
            GateKind::PauliY => "PauliY",
            GateKind::PauliZ => "PauliZ",
            GateKind::Hadamard => "Hadamard",
            GateKind::S => "S",
            GateKind::T => "T",
            GateKind::Tdg => "Tdg",
            GateKind::SqrtNot => "SqrtNot",
            GateKind::Pulse => "Pulse",
            GateKind::Phase => "Phase",
            GateKind::Cnot => "CNOT",
            GateKind::CPhase => "CPhase",
            GateKind::PairZZ => "PairZZ",
            GateKind::GlobalG => "GlobalG",
            GateKind::GlobalGG => "GlobalGG",
            GateKind::NearestN => "NearestN",
            GateKind::CouplingU => "CouplingU",
        }
    }

    /// Required qubit count, `None` when variable.
    pub fn arity(self) -> Option<usize> {
        match self {
            GateKind::Cnot | GateKind::CPhase | GateKind::PairZZ => Some(2),
            GateKind::GlobalG | GateKind::NearestN => Some(3),
            GateKind::GlobalGG => Some(4),
            GateKind::CouplingU => None,
            _ => Some(1),
        }
    }

    pub fn takes_angle(self) -> bool {
        matches!(
            self,
            GateKind::Pulse
                | GateKind::Phase
                | GateKind::PairZZ
                | GateKind::GlobalG
                | GateKind::GlobalGG
                | GateKind::NearestN
                | GateKind::CouplingU
        )
    }

    pub fn is_entangler(self) -> bool {
        matches!(
            self,
            GateKind::Cnot
                | GateKind::CPhase
                | GateKind::PairZZ
                | GateKind::GlobalG
                | GateKind::GlobalGG
                | GateKind::NearestN
                | GateKind::CouplingU
        )
    }

    /// Single-qubit z-phase gates (the T-depth count).
    pub fn is_phase_gate(self) -> bool {
        matches!(self, GateKind::Phase | GateKind::S | GateKind::T | GateKind::Tdg)
    }

    /// Diagonal in the computational basis.
    pub fn is_diagonal(self) -> bool {
        matches!(
            self,
            GateKind::PauliZ
                | GateKind::S
                | GateKind::T
                | GateKind::Tdg
                | GateKind::Phase
                | GateKind::CPhase
                | GateKind::PairZZ
                | GateKind::GlobalG
                | GateKind::GlobalGG
                | GateKind::NearestN
                | GateKind::CouplingU
        )
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Unknown { what: "gate kind", name: s.to_string() })
    }
}

/// Symmetric real coupling matrix `J` (angular-frequency units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Couplings {
    n: usize,
    values: Vec<f64>,
}

impl Couplings {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::InvalidParameter("coupling matrix must be square".into()));
            }
            values.extend_from_slice(row);
        }
        let c = Self { n, values };
        for j in 0..n {
            for k in 0..j {
                let (a, b) = (c.get(j, k), c.get(k, j));
                if !a.is_finite() || (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "coupling matrix not symmetric at ({j},{k})"
                    )));
                }
            }
        }
        Ok(c)
    }

    /// All pairs coupled with strength `j`.
    pub fn uniform(n: usize, j: f64) -> Self {
        let mut values = vec![j; n * n];
        for i in 0..n {
            values[i * n + i] = 0.0;
        }
        Self { n, values }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.n + k]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Relabels so that new index `i` is old index `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: perm.len() });
        }
        check_qubits(perm, self.n)?;
        let rows = (0..self.n)
            .map(|a| (0..self.n).map(|b| self.get(perm[a], perm[b])).collect())
            .collect();
        Self::new(rows)
    }
}

impl TryFrom<Vec<Vec<f64>>> for Couplings {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<Couplings> for Vec<Vec<f64>> {
    fn from(c: Couplings) -> Self {
        c.rows()
    }
}

/// One gate instance bound to qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub angle: Option<f64>,
    pub couplings: Option<Couplings>,
}

impl GateOp {
    /// Validated constructor.
    pub fn new(
        kind: GateKind,
        qubits: Vec<usize>,
        angle: Option<f64>,
        couplings: Option<Couplings>,
    ) -> Result<Self> {
        let op = Self { kind, qubits, angle, couplings };
        op.validate()?;
        Ok(op)
    }

    fn fixed(kind: GateKind, qubits: Vec<usize>) -> Self {
        Self { kind, qubits, angle: None, couplings: None }
    }

    fn angled(kind: GateKind, qubits: Vec<usize>, angle: f64) -> Self {
        Self { kind, qubits, angle: Some(angle), couplings: None }
    }

    pub fn pauli_x(q: usize) -> Self {
        Self::fixed(GateKind::PauliX, vec![q])
    }
    pub fn pauli_y(q: usize) -> Self {
        Self::fixed(GateKind::PauliY, vec![q])
    }
    pub fn pauli_z(q: usize) -> Self {
        Self::fixed(GateKind::PauliZ, vec![q])
    }
    pub fn hadamard(q: usize) -> Self {
        Self::fixed(GateKind::Hadamard, vec![q])
    }
    pub fn s(q: usize) -> Self {
        Self::fixed(GateKind::S, vec![q])
    }
    pub fn t(q: usize) -> Self {
        Self::fixed(GateKind::T, vec![q])
    }
    pub fn tdg(q: usize) -> Self {
        Self::fixed(GateKind::Tdg, vec![q])
    }
    pub fn sqrt_not(q: usize) -> Self {
        Self::fixed(GateKind::SqrtNot, vec![q])
    }
    /// `exp(-i θ/2 σx)` on qubit `q`.
    pub fn pulse(q: usize, theta: f64) -> Self {
        Self::angled(GateKind::Pulse, vec![q], theta)
    }
    /// The π/2 pulse `P`.
    pub fn p(q: usize) -> Self {
        Self::pulse(q, FRAC_PI_2)
    }
    /// The π/4 pulse `Q`.
    pub fn q(q: usize) -> Self {
        Self::pulse(q, FRAC_PI_4)
    }
    /// `exp(-i φ σz)` on qubit `q`.
    pub fn phase(q: usize, phi: f64) -> Self {
        Self::angled(GateKind::Phase, vec![q], phi)
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::fixed(GateKind::Cnot, vec![control, target])
    }
    pub fn cphase(a: usize, b: usize) -> Self {
        Self::fixed(GateKind::CPhase, vec![a, b])
    }
    pub fn pair_zz(a: usize, b: usize, phi: f64) -> Self {
        Self::angled(GateKind::PairZZ, vec![a, b], phi)
    }
    pub fn global_g(qubits: [usize; 3], phi: f64) -> Self {
        Self::angled(GateKind::GlobalG, qubits.to_vec(), phi)
    }
    pub fn global_gg(qubits: [usize; 4], phi: f64) -> Self {
        Self::angled(GateKind::GlobalGG, qubits.to_vec(), phi)
    }
    /// Chain coupling; `qubits[1]` is the middle of the chain.
    pub fn nearest_n(qubits: [usize; 3], phi: f64) -> Self {
        Self::angled(GateKind::NearestN, qubits.to_vec(), phi)
    }
    /// Free evolution for duration `tau` under couplings `j`.
    pub fn coupling_u(qubits: Vec<usize>, j: Couplings, tau: f64) -> Self {
        Self { kind: GateKind::CouplingU, qubits, angle: Some(tau), couplings: Some(j) }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Err(Error::MalformedGate { kind: self.kind, reason });
        if let Some(a) = self.kind.arity() {
            if self.qubits.len() != a {
                return bad(format!("expects {a} qubits, got {}", self.qubits.len()));
            }
        } else if self.qubits.len() < 2 {
            return bad("needs at least two qubits".into());
        }
        for (i, q) in self.qubits.iter().enumerate() {
            if self.qubits[..i].contains(q) {
                return Err(Error::DuplicateQubit(*q));
            }
        }
        match (self.kind.takes_angle(), self.angle) {
            (true, None) => return bad("missing angle".into()),
            (false, Some(_)) => return bad("does not take an angle".into()),
            (true, Some(a)) if !a.is_finite() => return bad("angle is not finite".into()),
            _ => {}
        }
        match (self.kind, &self.couplings) {
            (GateKind::CouplingU, None) => return bad("missing couplings".into()),
            (GateKind::CouplingU, Some(c)) if c.size() != self.qubits.len() => {
                return bad(format!(
                    "coupling matrix is {}x{} for {} qubits",
                    c.size(),
                    c.size(),
                    self.qubits.len()
                ))
            }
            (k, Some(_)) if k != GateKind::CouplingU => return bad("does not take couplings".into()),
            _ => {}
        }
        Ok(())
    }

    pub fn angle_or_zero(&self) -> f64 {
        self.angle.unwrap_or(0.0)
    }

    /// ZZ weights `(a, b, w)` over positions in `self.qubits` for diagonal
    /// entanglers, so the diagonal phase is `angle * Σ w s_a s_b`.
    pub fn zz_weights(&self) -> Option<Vec<(usize, usize, f64)>> {
        let all_pairs = |m: usize| {
            (0..m).flat_map(move |a| (a + 1..m).map(move |b| (a, b, 1.0))).collect::<Vec<_>>()
        };
        match self.kind {
            GateKind::PairZZ => Some(vec![(0, 1, 1.0)]),
            GateKind::GlobalG | GateKind::GlobalGG => Some(all_pairs(self.qubits.len())),
            GateKind::NearestN => Some(vec![(0, 1, 1.0), (1, 2, 1.0)]),
            GateKind::CouplingU => {
                let j = self.couplings.as_ref()?;
                let m = self.qubits.len();
                Some(
                    (0..m)
                        .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
                        .map(|(a, b)| (a, b, 0.5 * j.get(a, b)))
                        .collect(),
                )
            }
            _ => None,
        }
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(a) = self.angle {
            write!(f, "({})", crate::angle::format_angle(a))?;
        }
        let q: Vec<String> = self.qubits.iter().map(usize::to_string).collect();
        write!(f, "[{}]", q.join(","))
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![ZERO, C64::new(0.0, -1.0)], vec![C64::new(0.0, 1.0), ZERO]])
        .expect("2x2")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

pub fn hadamard() -> ComplexMatrix {
    let s = FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]])
}

pub fn pulse_matrix(theta: f64) -> ComplexMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    ComplexMatrix::from_rows(&[
        vec![C64::new(c, 0.0), C64::new(0.0, -s)],
        vec![C64::new(0.0, -s), C64::new(c, 0.0)],
    ])
    .expect("2x2")
}

pub fn phase_matrix(phi: f64) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[C64::from_polar(1.0, -phi), C64::from_polar(1.0, phi)])
}

/// Pauli matrix for axis `x`, `y` or `z`.
pub fn pauli(axis: Axis) -> ComplexMatrix {
    match axis {
        Axis::X => pauli_x(),
        Axis::Y => pauli_y(),
        Axis::Z => pauli_z(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Collective spin projection `J_β = ½ Σ_k σ_k^β` on `n` qubits.
pub fn collective_spin(n: usize, axis: Axis) -> ComplexMatrix {
    let p = pauli(axis);
    let mut total = ComplexMatrix::zeros(1 << n);
    for k in 0..n {
        let term = embed(&p, &[k], n).expect("valid qubit");
        total = total.add(&term).expect("same dim");
    }
    total.scale(C64::new(0.5, 0.0))
}

/// Diagonal of `exp(i scale Σ w s_a s_b)` over the full `n`-qubit space.
pub fn zz_phase_diagonal(pairs: &[(usize, usize, f64)], scale: f64, n: usize) -> Vec<C64> {
    zz_sum_diagonal(pairs, n).into_iter().map(|c| C64::from_polar(1.0, scale * c)).collect()
}

/// Diagonal of the real operator `Σ w σz_a σz_b` on `n` qubits.
pub fn zz_sum_diagonal(pairs: &[(usize, usize, f64)], n: usize) -> Vec<f64> {
    (0..1usize << n)
        .map(|b| pairs.iter().map(|&(j, k, w)| w * spin_sign(b, j, n) * spin_sign(b, k, n)).sum())
        .collect()
}

fn local_matrix(op: &GateOp) -> Option<ComplexMatrix> {
    let a = op.angle_or_zero();
    Some(match op.kind {
        GateKind::PauliX => pauli_x(),
        GateKind::PauliY => pauli_y(),
        GateKind::PauliZ => pauli_z(),
        GateKind::Hadamard => hadamard(),
        GateKind::S => ComplexMatrix::from_diagonal(&[ONE, C64::new(0.0, 1.0)]),
        GateKind::T => ComplexMatrix::from_diagonal(&[ONE, C64::from_polar(1.0, FRAC_PI_4)]),
        GateKind::Tdg => ComplexMatrix::from_diagonal(&[ONE, C64::from_polar(1.0, -FRAC_PI_4)]),
        GateKind::SqrtNot => {
            let s = FRAC_1_SQRT_2;
            ComplexMatrix::from_rows(&[
                vec![C64::new(s, 0.0), C64::new(0.0, s)],
                vec![C64::new(0.0, s), C64::new(s, 0.0)],
            ])
            .expect("2x2")
        }
        GateKind::Pulse => pulse_matrix(a),
        GateKind::Phase => phase_matrix(a),
        GateKind::Cnot => {
            let mut m = ComplexMatrix::zeros(4);
            for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
                m[(r, c)] = ONE;
            }
            m
        }
        GateKind::CPhase => ComplexMatrix::from_diagonal(&[ONE, ONE, ONE, -ONE]),
        _ => return None,
    })
}

/// The `2^n x 2^n` unitary of `op` embedded in an `n`-qubit register.
pub fn gate_matrix(op: &GateOp, n: usize) -> Result<ComplexMatrix> {
    op.validate()?;
    check_qubits(&op.qubits, n)?;
    if let Some(weights) = op.zz_weights() {
        let global: Vec<_> =
            weights.iter().map(|&(a, b, w)| (op.qubits[a], op.qubits[b], w)).collect();
        return Ok(ComplexMatrix::from_diagonal(&zz_phase_diagonal(&global, op.angle_or_zero(), n)));
    }
    let local = local_matrix(op).expect("all non-ZZ kinds have a local matrix");
    embed(&local, &op.qubits, n)
}

/// `G(φ)` on qubits 0,1,2 as the product of its three commuting pair factors.
pub fn decompose_g_as_pair_product(phi: f64) -> [GateOp; 3] {
    [GateOp::pair_zz(0, 1, phi), GateOp::pair_zz(1, 2, phi), GateOp::pair_zz(0, 2, phi)]
}

/// Standard angles as exact multiples of π, used by the catalog.
pub mod angles {
    use super::PI;
    pub const PI_2: f64 = PI / 2.0;
    pub const PI_4: f64 = PI / 4.0;
    pub const PI_8: f64 = PI / 8.0;
    pub const PI_16: f64 = PI / 16.0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{expm, kron, phase_aligned_distance, raw_distance};

    fn signs3() -> [[f64; 3]; 8] {
        let mut out = [[0.0; 3]; 8];
        for (b, row) in out.iter_mut().enumerate() {
            for (k, s) in row.iter_mut().enumerate() {
                *s = if (b >> (2 - k)) & 1 == 0 { 1.0 } else { -1.0 };
            }
        }
        out
    }

    #[test]
    fn zero_phase_is_identity() {
        assert_eq!(gate_matrix(&GateOp::phase(0, 0.0), 1).unwrap(), ComplexMatrix::identity(2));
    }

    #[test]
    fn hadamard_matrix() {
        let h = gate_matrix(&GateOp::hadamard(0), 1).unwrap();
        let s = FRAC_1_SQRT_2;
        assert_eq!(h, ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]]));
    }

    #[test]
    fn global_g_diagonal_from_sign_products() {
        let phi = 0.731;
        let m = gate_matrix(&GateOp::global_g([0, 1, 2], phi), 3).unwrap();
        let expected_c = [3.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0, 3.0];
        for (b, s) in signs3().iter().enumerate() {
            let c = s[0] * s[1] + s[1] * s[2] + s[0] * s[2];
            assert_eq!(c, expected_c[b]);
            assert!((m[(b, b)] - C64::from_polar(1.0, phi * c)).norm() < 1e-15);
        }
        assert!(m.is_diagonal(0.0));
    }

    #[test]
    fn nearest_n_uses_chain_pairs() {
        let phi = 0.4;
        let m = gate_matrix(&GateOp::nearest_n([0, 1, 2], phi), 3).unwrap();
        for (b, s) in signs3().iter().enumerate() {
            let c = s[0] * s[1] + s[1] * s[2];
            assert!((m[(b, b)] - C64::from_polar(1.0, phi * c)).norm() < 1e-15);
        }
    }

    #[test]
    fn malformed_ops_rejected() {
        let bad = GateOp { kind: GateKind::GlobalG, qubits: vec![0, 1], angle: Some(1.0), couplings: None };
        assert!(matches!(gate_matrix(&bad, 3), Err(Error::MalformedGate { .. })));
        let no_angle = GateOp { kind: GateKind::Pulse, qubits: vec![0], angle: None, couplings: None };
        assert!(no_angle.validate().is_err());
        assert!(matches!(gate_matrix(&GateOp::p(3), 3), Err(Error::QubitOutOfRange { .. })));
        let u = GateOp::coupling_u(vec![0, 1, 2], Couplings::uniform(2, 1.0), 1.0);
        assert!(u.validate().is_err());
    }

    #[test]
    fn pair_product_matches_global_g() {
        for &phi in &[0.0, FRAC_PI_4, 1.234] {
            let g = gate_matrix(&GateOp::global_g([0, 1, 2], phi), 3).unwrap();
            let factors = decompose_g_as_pair_product(phi);
            let mats: Vec<_> = factors.iter().map(|f| gate_matrix(f, 3).unwrap()).collect();
            if phi == 0.0 {
                for m in &mats {
                    assert_eq!(*m, ComplexMatrix::identity(8));
                }
            }
            let prod = &(&mats[0] * &mats[1]) * &mats[2];
            assert!(raw_distance(&prod, &g).unwrap() < 1e-13);
        }
    }

    #[test]
    fn rotation_identities() {
        let tol = 1e-12;
        let d = |a: &ComplexMatrix, b: &ComplexMatrix| phase_aligned_distance(a, b).unwrap();
        let m = |op: GateOp| gate_matrix(&op, 1).unwrap();
        let sx_from_pulse = pulse_matrix(PI).scale(C64::new(0.0, 1.0));
        assert!(pauli_x().approx_eq(&sx_from_pulse, tol));
        assert!(m(GateOp::s(0)).approx_eq(&phase_matrix(FRAC_PI_4).scale(C64::from_polar(1.0, FRAC_PI_4)), tol));
        assert!(m(GateOp::t(0)).approx_eq(&phase_matrix(PI / 8.0).scale(C64::from_polar(1.0, PI / 8.0)), tol));
        let h = &(&phase_matrix(FRAC_PI_4) * &pulse_matrix(FRAC_PI_2)) * &phase_matrix(FRAC_PI_4);
        assert!(hadamard().approx_eq(&h.scale(C64::new(0.0, 1.0)), tol));
        assert!(d(&hadamard(), &h) < tol);
    }

    #[test]
    fn collective_spin_identity() {
        for n in 2..=4 {
            for axis in [Axis::X, Axis::Y, Axis::Z] {
                let j = collective_spin(n, axis);
                let lhs = &j * &j;
                let p = pauli(axis);
                let mut rhs = ComplexMatrix::identity(1 << n).scale(C64::new(n as f64 / 4.0, 0.0));
                for a in 0..n {
                    for b in a + 1..n {
                        let pp = embed(&kron(&p, &p), &[a, b], n).unwrap();
                        rhs = rhs.add(&pp.scale(C64::new(0.5, 0.0))).unwrap();
                    }
                }
                assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-13, "n={n} {axis:?}");
            }
        }
    }

    #[test]
    fn jz_squared_exponential_is_global_g() {
        let phi = 0.61;
        let jz = collective_spin(3, Axis::Z);
        let gen = (&jz * &jz)
            .scale(C64::new(2.0, 0.0))
            .sub(&ComplexMatrix::identity(8).scale(C64::new(1.5, 0.0)))
            .unwrap();
        let u = expm(&gen.scale(C64::new(0.0, phi)));
        let g = gate_matrix(&GateOp::global_g([0, 1, 2], phi), 3).unwrap();
        assert!(u.max_abs_diff(&g).unwrap() < 1e-12);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in GateKind::ALL {
            assert_eq!(k.name().parse::<GateKind>().unwrap(), k);
        }
        assert!(matches!("XX".parse::<GateKind>(), Err(Error::Unknown { .. })));
    }
}
