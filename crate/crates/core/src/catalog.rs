//! Target gates and the explicit circuits that realize them.
//!
//! Qubits are 0-based here; the operator sequences are listed in time order.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gates::{angles::*, Couplings, GateOp};
use crate::ion::trap::dimensionless_couplings;
use crate::tensor::{ComplexMatrix, ONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetGate {
    Toffoli,
    CCPhase,
    CCCPhase,
    Fredkin,
    Cnot,
    CPhase,
}

impl TargetGate {
    pub const ALL: [TargetGate; 6] = [
        TargetGate::Toffoli,
        TargetGate::CCPhase,
        TargetGate::CCCPhase,
        TargetGate::Fredkin,
        TargetGate::Cnot,
        TargetGate::CPhase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TargetGate::Toffoli => "toffoli",
            TargetGate::CCPhase => "ccphase",
            TargetGate::CCCPhase => "cccphase",
            TargetGate::Fredkin => "fredkin",
            TargetGate::Cnot => "cnot",
            TargetGate::CPhase => "cphase",
        }
    }

    pub fn n_qubits(self) -> usize {
        match self {
            TargetGate::Cnot | TargetGate::CPhase => 2,
            TargetGate::CCCPhase => 4,
            _ => 3,
        }
    }

    pub fn matrix(self) -> ComplexMatrix {
        let dim = 1 << self.n_qubits();
        let mut m = ComplexMatrix::identity(dim);
        let swap = |m: &mut ComplexMatrix, a: usize, b: usize| {
            m[(a, a)] = 0.0.into();
            m[(b, b)] = 0.0.into();
            m[(a, b)] = ONE;
            m[(b, a)] = ONE;
        };
        match self {
            TargetGate::Toffoli => swap(&mut m, 0b110, 0b111),
            TargetGate::Fredkin => swap(&mut m, 0b101, 0b110),
            TargetGate::Cnot => swap(&mut m, 0b10, 0b11),
            TargetGate::CCPhase | TargetGate::CCCPhase | TargetGate::CPhase => {
                m[(dim - 1, dim - 1)] = -ONE;
            }
        }
        m
    }
}

impl fmt::Display for TargetGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TargetGate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['-', '_'], "");
        TargetGate::ALL
            .into_iter()
            .find(|t| t.name() == key)
            .ok_or_else(|| Error::Unknown { what: "target gate", name: s.to_string() })
    }
}

pub fn target_matrix(name: &str) -> Result<ComplexMatrix> {
    name.parse::<TargetGate>().map(TargetGate::matrix)
}

/// Angles of the unequal-coupling circuit, in units of π, as printed
/// (three decimals): `[φ1, φ2, θ1, θ2, θ3]`.
pub const UNEQUAL_J_PRINTED_ANGLES: [f64; 5] = [0.375, 0.258, 1.032, 0.484, 1.484];

/// Relabelling of the physical chain (outer, middle, outer) so that qubit 0
/// is the middle ion and `J01 = J02`.
pub const UNEQUAL_J_RELABEL: [usize; 3] = [1, 0, 2];

/// Pass threshold for the printed unequal-coupling angles.
pub const UNEQUAL_J_TOLERANCE: f64 = 5e-3;

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub key: &'static str,
    pub target: TargetGate,
    pub circuit: Circuit,
    /// Aligned-distance tolerance the circuit is expected to meet.
    pub tolerance: f64,
    /// Number of entangling gates the construction claims.
    pub claimed_entanglers: usize,
}

pub const CATALOG_KEYS: [&str; 6] = [
    "ccphase-global-3G",
    "ccphase-HT",
    "fredkin-global-4G",
    "cccphase-global-7GG",
    "ccphase-unequal-J",
    "toffoli-standard-6cnot",
];

pub fn catalog_circuit(key: &str) -> Result<Circuit> {
    catalog_entry(key).map(|e| e.circuit)
}

pub fn catalog_entry(key: &str) -> Result<CatalogEntry> {
    let (target, tolerance, claimed, ops, n) = match key {
        "ccphase-global-3G" => (TargetGate::CCPhase, 1e-10, 3, ccphase_global(), 3),
        "ccphase-HT" => (TargetGate::CCPhase, 1e-10, 3, ccphase_ht(), 3),
        "fredkin-global-4G" => (TargetGate::Fredkin, 1e-10, 4, fredkin_global(), 3),
        "cccphase-global-7GG" => (TargetGate::CCCPhase, 1e-10, 7, cccphase_global(), 4),
        "ccphase-unequal-J" => {
            let j = unequal_j_couplings()?;
            let a = UNEQUAL_J_PRINTED_ANGLES.map(|x| x * PI);
            (TargetGate::CCPhase, UNEQUAL_J_TOLERANCE, 3, ccphase_unequal_j(&j, a), 3)
        }
        "toffoli-standard-6cnot" => (TargetGate::Toffoli, 1e-10, 6, toffoli_standard(), 3),
        _ => return Err(Error::Unknown { what: "catalog key", name: key.to_string() }),
    };
    let mut circuit = Circuit::from_ops(n, ops)?.with_name(key);
    circuit.metadata.insert("target".into(), target.name().into());
    if key == "ccphase-unequal-J" {
        let report = circuit.verify(&target.matrix(), tolerance)?;
        let status = if report.passed { "angles as printed" } else { "angles as printed; see report" };
        circuit.metadata.insert("status".into(), status.into());
        circuit.metadata.insert("printed_angle_residual".into(), format!("{:.6e}", report.aligned_distance));
    }
    Ok(CatalogEntry { key: CATALOG_KEYS.iter().find(|k| **k == key).expect("listed"), target, circuit, tolerance, claimed_entanglers: claimed })
}

pub fn all_entries() -> Result<Vec<CatalogEntry>> {
    CATALOG_KEYS.iter().map(|k| catalog_entry(k)).collect()
}

const G3: [usize; 3] = [0, 1, 2];
const G4: [usize; 4] = [0, 1, 2, 3];

fn g(phi: f64) -> GateOp {
    GateOp::global_g(G3, phi)
}

fn ccphase_global() -> Vec<GateOp> {
    vec![
        GateOp::p(0),
        g(PI_4),
        GateOp::p(0),
        GateOp::phase(0, PI_8),
        GateOp::p(0),
        g(PI_4),
        GateOp::p(0),
        g(PI_8),
        GateOp::phase(0, PI_8),
        GateOp::phase(1, 5.0 * PI / 8.0),
        GateOp::phase(2, 5.0 * PI / 8.0),
    ]
}

fn ccphase_ht() -> Vec<GateOp> {
    vec![
        GateOp::hadamard(0),
        g(PI_4),
        GateOp::hadamard(0),
        GateOp::tdg(0),
        GateOp::hadamard(0),
        g(PI_4),
        GateOp::hadamard(0),
        g(PI_8),
        GateOp::t(0),
        GateOp::t(1),
        GateOp::t(2),
    ]
}

fn fredkin_global() -> Vec<GateOp> {
    vec![
        GateOp::p(2),
        GateOp::phase(2, PI_2),
        g(PI_4),
        GateOp::p(1),
        GateOp::p(2),
        GateOp::phase(0, 3.0 * PI / 8.0),
        GateOp::phase(1, 5.0 * PI / 8.0),
        GateOp::phase(2, 7.0 * PI / 8.0),
        g(PI_8),
        GateOp::p(1),
        g(PI_4),
        GateOp::phase(1, 3.0 * PI / 4.0),
        GateOp::q(1),
        GateOp::p(2),
        GateOp::phase(2, PI_2),
        g(PI_4),
        GateOp::p(2),
        GateOp::phase(2, PI_4),
    ]
}

fn cccphase_global() -> Vec<GateOp> {
    let all_p = || G4.map(GateOp::p).to_vec();
    let p123 = || [0, 1, 2].map(GateOp::p).to_vec();
    let all_phase = |phi: f64| G4.map(|q| GateOp::phase(q, phi)).to_vec();
    let gg = |phi: f64| vec![GateOp::global_gg(G4, phi)];
    let phase4 = |phi: f64| vec![GateOp::phase(3, phi)];
    [
        all_p(),
        gg(PI_4),
        all_phase(PI_2),
        p123(),
        gg(PI_4),
        all_phase(-PI_4),
        all_p(),
        phase4(-PI_16),
        gg(PI_4),
        all_p(),
        gg(PI_4),
        phase4(-PI_4),
        vec![GateOp::p(3)],
        phase4(PI_8),
        all_phase(PI_16),
        all_p(),
        gg(PI_4),
        all_phase(-PI_4),
        all_p(),
        phase4(PI_2),
        gg(PI_4),
        all_phase(-PI_4),
        all_p(),
        gg(PI_16),
        phase4(PI_2),
        all_phase(9.0 * PI / 16.0),
    ]
    .concat()
}

/// Harmonic-trap coupling shape for three ions after relabelling.
pub fn unequal_j_couplings() -> Result<Couplings> {
    dimensionless_couplings(3)?.relabel(&UNEQUAL_J_RELABEL)
}

/// `U(φ) = U(2φ/J01)`: free evolution reaching entangling angle `φ` on the
/// reference pair.
pub fn coupling_gate(j: &Couplings, phi: f64) -> GateOp {
    GateOp::coupling_u(vec![0, 1, 2], j.clone(), 2.0 * phi / j.get(0, 1))
}

/// Unequal-coupling cc-phase sequence with free angles `[φ1, φ2, θ1, θ2, θ3]`
/// in radians.
pub fn ccphase_unequal_j(j: &Couplings, angles: [f64; 5]) -> Vec<GateOp> {
    let [phi1, phi2, th1, th2, th3] = angles;
    vec![
        GateOp::p(0),
        coupling_gate(j, PI_4),
        GateOp::p(0),
        GateOp::phase(0, PI_8),
        GateOp::pulse(0, th1),
        coupling_gate(j, phi1),
        GateOp::pulse(0, th2),
        coupling_gate(j, phi2),
        GateOp::pulse(0, th3),
        GateOp::phase(0, PI_8),
        GateOp::phase(1, 5.0 * PI / 8.0),
        GateOp::phase(2, 5.0 * PI / 8.0),
    ]
}

fn toffoli_standard() -> Vec<GateOp> {
    vec![
        GateOp::hadamard(2),
        GateOp::cnot(1, 2),
        GateOp::tdg(2),
        GateOp::cnot(0, 2),
        GateOp::t(2),
        GateOp::cnot(1, 2),
        GateOp::tdg(2),
        GateOp::cnot(0, 2),
        GateOp::tdg(1),
        GateOp::t(2),
        GateOp::cnot(0, 1),
        GateOp::hadamard(2),
        GateOp::tdg(1),
        GateOp::cnot(0, 1),
        GateOp::t(0),
        GateOp::s(1),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{gate_matrix, GateKind};
    use crate::tensor::{embed, raw_distance};

    #[test]
    fn target_matrices() {
        let ccp = TargetGate::CCPhase.matrix();
        let mut expected = ComplexMatrix::identity(8);
        expected[(7, 7)] = -ONE;
        assert_eq!(ccp, expected);
        let f = TargetGate::Fredkin.matrix();
        assert_eq!(&f * &f, ComplexMatrix::identity(8));
        let ccc = TargetGate::CCCPhase.matrix();
        assert_eq!(ccc.diagonal().iter().filter(|z| **z == -ONE).count(), 1);
        assert!(target_matrix("swap").is_err());
        assert_eq!("CCPhase".parse::<TargetGate>().unwrap(), TargetGate::CCPhase);
    }

    #[test]
    fn toffoli_is_hadamard_conjugated_ccphase() {
        let h = embed(&crate::gates::hadamard(), &[2], 3).unwrap();
        let t = &(&h * &TargetGate::CCPhase.matrix()) * &h;
        assert!(raw_distance(&t, &TargetGate::Toffoli.matrix()).unwrap() < 1e-14);
    }

    #[test]
    fn entries_verify() {
        for entry in all_entries().unwrap() {
            let report = entry.circuit.verify(&entry.target.matrix(), entry.tolerance.max(0.02)).unwrap();
            assert!(report.passed, "{}: {}", entry.key, report.aligned_distance);
            assert_eq!(entry.circuit.entangler_count(), entry.claimed_entanglers, "{}", entry.key);
        }
    }

    #[test]
    fn unequal_j_without_coupling_spread_reduces_to_global() {
        let uniform = Couplings::uniform(3, 0.8);
        let u = gate_matrix(&coupling_gate(&uniform, 0.3), 3).unwrap();
        let g = gate_matrix(&GateOp::global_g([0, 1, 2], 0.3), 3).unwrap();
        assert!(u.max_abs_diff(&g).unwrap() < 1e-14);
        assert_eq!(coupling_gate(&uniform, 0.3).kind, GateKind::CouplingU);
    }

    #[test]
    fn unknown_key() {
        assert!(matches!(catalog_circuit("nope"), Err(Error::Unknown { .. })));
    }
}
