//! The layered ansatz: local layers interleaved with entanglers, then a
//! trailing local layer.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::template::Template;
use crate::error::{Error, Result};
use crate::gates::{Couplings, GateOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplerKind {
    GlobalG,
    GlobalGG,
    NearestN,
    CouplingU,
}

impl CouplerKind {
    pub fn name(self) -> &'static str {
        match self {
            CouplerKind::GlobalG => "global-g",
            CouplerKind::GlobalGG => "global-gg",
            CouplerKind::NearestN => "nearest-n",
            CouplerKind::CouplingU => "coupling-u",
        }
    }
}

impl fmt::Display for CouplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CouplerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [CouplerKind::GlobalG, CouplerKind::GlobalGG, CouplerKind::NearestN, CouplerKind::CouplingU]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Unknown { what: "coupler", name: s.to_string() })
    }
}

/// The entangling gate available to the synthesizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplerModel {
    pub kind: CouplerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Couplings>,
    pub n_qubits: usize,
}

impl CouplerModel {
    pub fn new(kind: CouplerKind, n_qubits: usize) -> Result<Self> {
        let m = Self { kind, couplings: None, n_qubits };
        m.validate()?;
        Ok(m)
    }

    /// Default register size for each kind (`CouplingU` needs explicit couplings).
    pub fn standard(kind: CouplerKind) -> Result<Self> {
        match kind {
            CouplerKind::GlobalGG => Self::new(kind, 4),
            _ => Self::new(kind, 3),
        }
    }

    pub fn with_couplings(couplings: Couplings) -> Result<Self> {
        let m = Self { kind: CouplerKind::CouplingU, n_qubits: couplings.size(), couplings: Some(couplings) };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match (self.kind, self.n_qubits) {
            (CouplerKind::GlobalG | CouplerKind::NearestN, 3) | (CouplerKind::GlobalGG, 4) => {}
            (CouplerKind::CouplingU, 2..=4) => {}
            (k, n) => return bad(format!("coupler {k} does not act on {n} qubits")),
        }
        match (self.kind, &self.couplings) {
            (CouplerKind::CouplingU, None) => bad("coupling-u needs a coupling matrix".into()),
            (CouplerKind::CouplingU, Some(j)) if j.size() != self.n_qubits => {
                bad(format!("coupling matrix is {}x{} for {} qubits", j.size(), j.size(), self.n_qubits))
            }
            (CouplerKind::CouplingU, Some(j)) if j.get(0, 1) == 0.0 => {
                bad("coupling between qubits 0 and 1 must be nonzero".into())
            }
            (CouplerKind::CouplingU, _) => Ok(()),
            (_, Some(_)) => bad(format!("coupler {} takes no coupling matrix", self.kind)),
            (_, None) => Ok(()),
        }
    }

    /// The entangler and the scale from entangling angle to its own angle.
    /// For free evolution the parameter is the angle reached on pair (0, 1),
    /// `τ = 2φ/J01`.
    pub fn entangler(&self) -> (GateOp, f64) {
        match self.kind {
            CouplerKind::GlobalG => (GateOp::global_g([0, 1, 2], 0.0), 1.0),
            CouplerKind::GlobalGG => (GateOp::global_gg([0, 1, 2, 3], 0.0), 1.0),
            CouplerKind::NearestN => (GateOp::nearest_n([0, 1, 2], 0.0), 1.0),
            CouplerKind::CouplingU => {
                let j = self.couplings.clone().expect("validated");
                let scale = 2.0 / j.get(0, 1);
                (GateOp::coupling_u((0..self.n_qubits).collect(), j, 0.0), scale)
            }
        }
    }
}

/// Content of the trailing local layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FinalLayer {
    /// Phases only for diagonal targets, pulse and phase otherwise.
    #[default]
    Auto,
    Phases,
    Full,
}

impl FromStr for FinalLayer {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(FinalLayer::Auto),
            "phases" => Ok(FinalLayer::Phases),
            "full" => Ok(FinalLayer::Full),
            _ => Err(Error::Unknown { what: "final layer", name: s.to_string() }),
        }
    }
}

/// Replacement of one entangler by a gate on a proper subset of qubits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Substitution {
    /// Index of the entangler being replaced, in time order.
    pub position: usize,
    /// Two qubits give a pair coupling, three a `G` on that triple.
    pub qubits: Vec<usize>,
}

impl Substitution {
    pub fn gate(&self) -> Result<GateOp> {
        match *self.qubits.as_slice() {
            [a, b] => Ok(GateOp::pair_zz(a, b, 0.0)),
            [a, b, c] => Ok(GateOp::global_g([a, b, c], 0.0)),
            _ => Err(Error::InvalidParameter(format!("substitution on {} qubits", self.qubits.len()))),
        }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q: Vec<String> = self.qubits.iter().map(usize::to_string).collect();
        write!(f, "entangler {} -> {}[{}]", self.position, if q.len() == 2 { "PairZZ" } else { "GlobalG" }, q.join(","))
    }
}

/// Parameter layout of a built ansatz.
///
/// Parameters are ordered by local layer, qubit and `(φ, θ)`, then the
/// entangler angles, then the trailing layer (`φ` per qubit, or `(φ, θ)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n_qubits: usize,
    pub n_entanglers: usize,
    pub full_final: bool,
}

impl Layout {
    pub fn local_phase(&self, layer: usize, qubit: usize) -> usize {
        layer * 2 * self.n_qubits + 2 * qubit
    }

    pub fn local_pulse(&self, layer: usize, qubit: usize) -> usize {
        self.local_phase(layer, qubit) + 1
    }

    pub fn entangler(&self, layer: usize) -> usize {
        self.n_entanglers * 2 * self.n_qubits + layer
    }

    fn final_base(&self) -> usize {
        self.n_entanglers * (2 * self.n_qubits + 1)
    }

    pub fn final_phase(&self, qubit: usize) -> usize {
        self.final_base() + if self.full_final { 2 * qubit } else { qubit }
    }

    pub fn final_pulse(&self, qubit: usize) -> Option<usize> {
        self.full_final.then(|| self.final_base() + 2 * qubit + 1)
    }

    pub fn n_params(&self) -> usize {
        self.final_base() + if self.full_final { 2 * self.n_qubits } else { self.n_qubits }
    }

    /// Whether parameter `i` drives an entangler (as opposed to a local gate).
    pub fn is_entangler(&self, i: usize) -> bool {
        (self.entangler(0)..self.final_base()).contains(&i)
    }

    /// Whether parameter `i` is a phase angle.
    pub fn is_phase(&self, i: usize) -> bool {
        if i < self.entangler(0) {
            i.is_multiple_of(2)
        } else if i >= self.final_base() {
            !self.full_final || (i - self.final_base()).is_multiple_of(2)
        } else {
            false
        }
    }
}

#[derive(Debug, Clone)]
pub struct Ansatz {
    pub template: Template,
    pub layout: Layout,
    pub substitution: Option<Substitution>,
}

/// `L₁ B L₂ B … L_{N_G} B L_final`, with `L` a per-qubit pulse followed by a
/// phase.
pub fn build_ansatz(
    coupler: &CouplerModel,
    n_entanglers: usize,
    full_final: bool,
    substitution: Option<&Substitution>,
) -> Result<Ansatz> {
    coupler.validate()?;
    let n = coupler.n_qubits;
    if let Some(s) = substitution {
        if s.position >= n_entanglers {
            return Err(Error::InvalidParameter(format!(
                "substitution position {} with {} entanglers",
                s.position, n_entanglers
            )));
        }
        s.gate()?;
    }
    let layout = Layout { n_qubits: n, n_entanglers, full_final };
    let mut t = Template::new(n)?;
    let (entangler, scale) = coupler.entangler();
    for layer in 0..n_entanglers {
        for q in 0..n {
            t.push_free(GateOp::pulse(q, 0.0), layout.local_pulse(layer, q), 1.0)?;
            t.push_free(GateOp::phase(q, 0.0), layout.local_phase(layer, q), 1.0)?;
        }
        match substitution.filter(|s| s.position == layer) {
            Some(s) => t.push_free(s.gate()?, layout.entangler(layer), 1.0)?,
            None => t.push_free(entangler.clone(), layout.entangler(layer), scale)?,
        }
    }
    for q in 0..n {
        if let Some(i) = layout.final_pulse(q) {
            t.push_free(GateOp::pulse(q, 0.0), i, 1.0)?;
        }
        t.push_free(GateOp::phase(q, 0.0), layout.final_phase(q), 1.0)?;
    }
    debug_assert_eq!(t.n_params(), layout.n_params());
    Ok(Ansatz { template: t, layout, substitution: substitution.cloned() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::GateKind;
    use crate::tensor::ComplexMatrix;

    #[test]
    fn parameter_counts() {
        let g = CouplerModel::standard(CouplerKind::GlobalG).unwrap();
        assert_eq!(build_ansatz(&g, 3, false, None).unwrap().layout.n_params(), 24);
        assert_eq!(build_ansatz(&g, 3, true, None).unwrap().layout.n_params(), 27);
        let a = build_ansatz(&g, 0, false, None).unwrap();
        assert_eq!(a.layout.n_params(), 3);
        assert_eq!(a.template.n_params(), 3);
    }

    #[test]
    fn zero_params_give_identity() {
        for kind in [CouplerKind::GlobalG, CouplerKind::GlobalGG, CouplerKind::NearestN] {
            let c = CouplerModel::standard(kind).unwrap();
            let a = build_ansatz(&c, 2, true, None).unwrap();
            let u = a.template.evaluate(&vec![0.0; a.layout.n_params()]).unwrap();
            assert!(u.approx_eq(&ComplexMatrix::identity(1 << c.n_qubits), 1e-15));
        }
    }

    #[test]
    fn layout_classification() {
        let l = Layout { n_qubits: 3, n_entanglers: 2, full_final: true };
        assert_eq!(l.local_phase(1, 2), 10);
        assert_eq!(l.entangler(1), 13);
        assert_eq!(l.final_phase(0), 14);
        assert_eq!(l.final_pulse(2), Some(19));
        assert!(l.is_entangler(12) && !l.is_entangler(14));
        assert!(l.is_phase(10) && !l.is_phase(11) && l.is_phase(16) && !l.is_phase(17));
    }

    #[test]
    fn coupler_validation() {
        assert!(CouplerModel::new(CouplerKind::GlobalG, 4).is_err());
        assert!(CouplerModel::new(CouplerKind::CouplingU, 3).is_err());
        let u = CouplerModel::with_couplings(Couplings::uniform(3, 2.0)).unwrap();
        assert_eq!(u.entangler().1, 1.0);
        assert_eq!("nearest-n".parse::<CouplerKind>().unwrap(), CouplerKind::NearestN);
    }

    #[test]
    fn substitution_replaces_one_entangler() {
        let c = CouplerModel::standard(CouplerKind::GlobalGG).unwrap();
        let s = Substitution { position: 1, qubits: vec![0, 1] };
        let a = build_ansatz(&c, 2, false, Some(&s)).unwrap();
        let kinds: Vec<_> = a.template.slots().filter(|(op, _)| op.kind.is_entangler()).map(|(op, _)| op.kind).collect();
        assert_eq!(kinds, vec![GateKind::GlobalGG, GateKind::PairZZ]);
        let bad = Substitution { position: 2, qubits: vec![0, 1] };
        assert!(build_ansatz(&c, 2, false, Some(&bad)).is_err());
    }
}
