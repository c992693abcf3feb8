//! Closed-form propagators of the bichromatic (Mølmer–Sørensen type) drive.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{hadamard, zz_phase_diagonal, Axis};
use crate::tensor::{kron_all, ComplexMatrix, C64, ONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinBasis {
    X,
    Z,
}

impl SpinBasis {
    pub fn axis(self) -> Axis {
        match self {
            SpinBasis::X => Axis::X,
            SpinBasis::Z => Axis::Z,
        }
    }
}

impl std::str::FromStr for SpinBasis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(SpinBasis::X),
            "z" | "Z" => Ok(SpinBasis::Z),
            _ => Err(Error::Unknown { what: "spin basis", name: s.to_string() }),
        }
    }
}

fn default_cutoff() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BichromaticParams {
    /// Spin-phonon coupling rate.
    pub g: f64,
    /// Detuning from the sidebands; nonzero.
    pub delta: f64,
    pub n_ions: usize,
    pub basis: SpinBasis,
    #[serde(default = "default_cutoff")]
    pub fock_cutoff: usize,
    #[serde(default)]
    pub lamb_dicke_eta: Option<f64>,
    #[serde(default)]
    pub rabi_omega: Option<f64>,
}

impl BichromaticParams {
    pub fn new(g: f64, delta: f64, n_ions: usize, basis: SpinBasis) -> Result<Self> {
        let p = Self {
            g,
            delta,
            n_ions,
            basis,
            fock_cutoff: default_cutoff(),
            lamb_dicke_eta: None,
            rabi_omega: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Coupling from the Lamb–Dicke parameter and Rabi frequency, `g = η Ω / √N`.
    pub fn from_lamb_dicke(eta: f64, omega: f64, delta: f64, n_ions: usize, basis: SpinBasis) -> Result<Self> {
        let mut p = Self::new(eta * omega / (n_ions as f64).sqrt(), delta, n_ions, basis)?;
        p.lamb_dicke_eta = Some(eta);
        p.rabi_omega = Some(omega);
        Ok(p)
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.fock_cutoff = cutoff;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta.is_finite() || self.delta == 0.0 {
            return Err(Error::InvalidParameter("detuning must be finite and nonzero".into()));
        }
        if !self.g.is_finite() {
            return Err(Error::InvalidParameter("coupling must be finite".into()));
        }
        if !(2..=4).contains(&self.n_ions) {
            return Err(Error::InvalidParameter(format!("n_ions must be 2..=4, got {}", self.n_ions)));
        }
        if self.fock_cutoff < 2 {
            return Err(Error::InvalidParameter("Fock cutoff must be at least 2".into()));
        }
        if let (Some(eta), Some(omega)) = (self.lamb_dicke_eta, self.rabi_omega) {
            let expected = eta * omega / (self.n_ions as f64).sqrt();
            if (expected - self.g).abs() > 1e-12 * expected.abs().max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "g = {} inconsistent with eta*Omega/sqrt(N) = {expected}",
                    self.g
                )));
            }
        }
        Ok(())
    }

    /// Time at which the motional displacement closes, `2π/δ`.
    pub fn gate_time(&self) -> f64 {
        2.0 * PI / self.delta.abs()
    }

    /// Entangling angle `φ = 4π g²/δ²` of the equivalent global gate.
    pub fn entangling_angle(&self) -> f64 {
        4.0 * PI * self.g * self.g / (self.delta * self.delta)
    }

    /// Global phase `2π g² N/δ²` separating the propagator from the global gate.
    pub fn global_phase(&self) -> f64 {
        0.5 * self.entangling_angle() * self.n_ions as f64
    }
}

/// Motional displacement per unit collective-spin eigenvalue,
/// `a(t) = (2g/δ)(1 - e^{iδt})`.
pub fn displacement_envelope(p: &BichromaticParams, t: f64) -> C64 {
    (ONE - C64::from_polar(1.0, p.delta * t)) * (2.0 * p.g / p.delta)
}

/// Spin phase accumulated up to time `t`: the coefficient `c(t)` in
/// `exp(i c(t) J²)`, `c = 4g²(δt - sin δt)/δ²`.
pub fn spin_phase_coefficient(p: &BichromaticParams, t: f64) -> f64 {
    4.0 * p.g * p.g * (p.delta * t - (p.delta * t).sin()) / (p.delta * p.delta)
}

/// Basis change taking σz to σ^β on one qubit: `V σz V† = σ^β`.
fn axis_rotation(axis: Axis) -> ComplexMatrix {
    match axis {
        Axis::Z => ComplexMatrix::identity(2),
        Axis::X => hadamard(),
        Axis::Y => {
            let s = ComplexMatrix::from_diagonal(&[ONE, C64::new(0.0, 1.0)]);
            &s * &hadamard()
        }
    }
}

/// `exp(i c J_β²)` on `n` spins via `J² = N/4 + ½ Σ_{j<k} σ_j σ_k`.
pub fn collective_squared_exp(n: usize, axis: Axis, c: f64) -> ComplexMatrix {
    let pairs: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b, 1.0))).collect();
    let offset = C64::from_polar(1.0, c * n as f64 / 4.0);
    let diag: Vec<C64> = zz_phase_diagonal(&pairs, 0.5 * c, n).into_iter().map(|z| z * offset).collect();
    let d = ComplexMatrix::from_diagonal(&diag);
    if axis == Axis::Z {
        return d;
    }
    let v1 = axis_rotation(axis);
    let v = kron_all(std::iter::repeat_n(&v1, n));
    &(&v * &d) * &v.adjoint()
}

/// Spin propagator at the gate time, `exp(i (8π g²/δ²) J_β²)`.
pub fn sm_propagator(p: &BichromaticParams) -> Result<ComplexMatrix> {
    p.validate()?;
    let c = 8.0 * PI * p.g * p.g / (p.delta * p.delta);
    Ok(collective_squared_exp(p.n_ions, p.basis.axis(), c))
}

/// Closed-form spin block `<s'| <n0| U(t) |n0> |s>` of the full propagator
/// at arbitrary `t`, for comparison with the Fock-space integration.
pub fn closed_form_spin_block(p: &BichromaticParams, t: f64, n0: usize) -> Result<ComplexMatrix> {
    p.validate()?;
    let axis = p.basis.axis();
    let n = p.n_ions;
    let c = spin_phase_coefficient(p, t);
    let a = displacement_envelope(p, t);
    // eigenvalues of J_β in the rotated computational basis
    let dim = 1usize << n;
    let diag: Vec<C64> = (0..dim)
        .map(|b| {
            let m = 0.5 * (n as f64 - 2.0 * b.count_ones() as f64);
            let alpha = a * m;
            C64::from_polar(1.0, c * m * m) * displacement_diagonal(alpha, n0)
        })
        .collect();
    let d = ComplexMatrix::from_diagonal(&diag);
    let v1 = axis_rotation(axis);
    let v = kron_all(std::iter::repeat_n(&v1, n));
    Ok(&(&v * &d) * &v.adjoint())
}

/// `<n|D(α)|n> = e^{-|α|²/2} L_n(|α|²)`.
fn displacement_diagonal(alpha: C64, n: usize) -> C64 {
    let x = alpha.norm_sqr();
    // Laguerre recurrence
    let (mut l_prev, mut l) = (1.0, 1.0 - x);
    if n == 0 {
        l = 1.0;
    }
    for k in 1..n {
        let next = ((2 * k + 1) as f64 - x) * l - k as f64 * l_prev;
        l_prev = l;
        l = next / (k + 1) as f64;
    }
    C64::new((-0.5 * x).exp() * l, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{collective_spin, gate_matrix, GateOp};
    use crate::tensor::{expm, phase_aligned_distance};

    #[test]
    fn envelope_values() {
        let p = BichromaticParams::new(0.25, 1.0, 3, SpinBasis::Z).unwrap();
        assert!(displacement_envelope(&p, 0.0).norm() < 1e-15);
        assert!(displacement_envelope(&p, 2.0 * PI).norm() < 1e-15);
        assert!((displacement_envelope(&p, PI).norm() - 1.0).abs() < 1e-15);
        let t = 0.77;
        let shifted = displacement_envelope(&p, t + p.gate_time());
        assert!((shifted - displacement_envelope(&p, t)).norm() < 1e-14);
    }

    #[test]
    fn zero_coupling_is_identity() {
        let p = BichromaticParams::new(0.0, 1.3, 3, SpinBasis::X).unwrap();
        assert!(sm_propagator(&p).unwrap().approx_eq(&ComplexMatrix::identity(8), 1e-15));
    }

    #[test]
    fn quarter_ratio_gives_g_pi_over_4() {
        let p = BichromaticParams::new(0.25, 1.0, 3, SpinBasis::Z).unwrap();
        assert!((p.entangling_angle() - PI / 4.0).abs() < 1e-15);
        let u = sm_propagator(&p).unwrap();
        let g = gate_matrix(&GateOp::global_g([0, 1, 2], PI / 4.0), 3).unwrap();
        assert!(phase_aligned_distance(&u, &g).unwrap() < 1e-12);
        let phased = g.scale(C64::from_polar(1.0, p.global_phase()));
        assert!(u.approx_eq(&phased, 1e-12));
    }

    #[test]
    fn identity_route_matches_dense_exponential() {
        for n in 2..=4 {
            for axis in [Axis::X, Axis::Y, Axis::Z] {
                for c in [0.3, PI / 2.0] {
                    let j = collective_spin(n, axis);
                    let direct = expm(&(&j * &j).scale(C64::new(0.0, c)));
                    let via = collective_squared_exp(n, axis, c);
                    assert!(direct.max_abs_diff(&via).unwrap() < 1e-12, "n={n} {axis:?} c={c}");
                }
            }
        }
    }

    #[test]
    fn lamb_dicke_consistency() {
        let p = BichromaticParams::from_lamb_dicke(0.1, 2.0, 1.0, 4, SpinBasis::X).unwrap();
        assert!((p.g - 0.1).abs() < 1e-15);
        let mut bad = p.clone();
        bad.g = 0.2;
        assert!(bad.validate().is_err());
        assert!(BichromaticParams::new(0.1, 0.0, 3, SpinBasis::X).is_err());
    }

    #[test]
    fn closed_form_block_at_gate_time_is_propagator() {
        let p = BichromaticParams::new(0.1, 1.0, 3, SpinBasis::X).unwrap();
        let block = closed_form_spin_block(&p, p.gate_time(), 0).unwrap();
        assert!(block.approx_eq(&sm_propagator(&p).unwrap(), 1e-12));
    }
}
