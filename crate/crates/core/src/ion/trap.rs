//! Linear Paul trap geometry and magnetic-gradient spin-spin couplings.
//!
//! Positions are in units of the Coulomb/harmonic length
//! `l = (e² / (4π ε0 m ω²))^(1/3)`; the axial potential in those units is
//! `V/(m ω² l²) = Σ u²/2 + Σ_{j<k} 1/|u_j - u_k|`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{zz_phase_diagonal, Couplings};
use crate::tensor::ComplexMatrix;

pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

const MAX_CONDITION: f64 = 1e12;
const FORCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapSpec {
    pub n_ions: usize,
    /// Magnetic field gradient, T/m.
    pub gradient_b: f64,
    pub g_factor: f64,
    /// J/T.
    pub bohr_magneton: f64,
    /// Axial trap frequency, rad/s.
    pub axial_frequency: f64,
    /// kg.
    pub ion_mass: f64,
}

impl TrapSpec {
    /// ¹⁷¹Yb⁺ in a 19 T/m gradient with a 2π·117 kHz axial trap.
    pub fn ytterbium(n_ions: usize) -> Self {
        Self {
            n_ions,
            gradient_b: 19.0,
            g_factor: 2.0,
            bohr_magneton: BOHR_MAGNETON,
            axial_frequency: 2.0 * std::f64::consts::PI * 117e3,
            ion_mass: 170.936_323 * ATOMIC_MASS_UNIT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gradient_b", self.gradient_b),
            ("g_factor", self.g_factor),
            ("bohr_magneton", self.bohr_magneton),
            ("axial_frequency", self.axial_frequency),
            ("ion_mass", self.ion_mass),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.n_ions < 2 {
            return Err(Error::InvalidParameter("need at least two ions".into()));
        }
        Ok(())
    }

    /// Coulomb/harmonic length scale in metres.
    pub fn length_scale(&self) -> f64 {
        let k = ELEMENTARY_CHARGE.powi(2) / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY);
        (k / (self.ion_mass * self.axial_frequency.powi(2))).cbrt()
    }

    /// Prefactor `(g μB b)² / (2 m ω² ħ)` converting the dimensionless
    /// inverse Hessian into couplings in rad/s.
    pub fn coupling_scale(&self) -> f64 {
        (self.g_factor * self.bohr_magneton * self.gradient_b).powi(2)
            / (2.0 * self.ion_mass * self.axial_frequency.powi(2) * HBAR)
    }
}

fn net_force(u: &[f64]) -> Vec<f64> {
    (0..u.len())
        .map(|i| {
            let coulomb: f64 = (0..u.len())
                .filter(|&j| j != i)
                .map(|j| {
                    let d = u[i] - u[j];
                    d.signum() / (d * d)
                })
                .sum();
            u[i] - coulomb
        })
        .collect()
}

/// Dimensionless axial Hessian `A` at positions `u`.
pub fn axial_hessian(u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    DMatrix::from_fn(n, n, |j, k| {
        if j == k {
            1.0 + (0..n).filter(|&m| m != j).map(|m| 2.0 / (u[j] - u[m]).abs().powi(3)).sum::<f64>()
        } else {
            -2.0 / (u[j] - u[k]).abs().powi(3)
        }
    })
}

/// Equilibrium positions of `n` ions, ascending and symmetric about zero.
pub fn equilibrium_positions(n: usize) -> Result<Vec<f64>> {
    if !(1..=16).contains(&n) {
        return Err(Error::InvalidParameter(format!("unsupported ion count {n}")));
    }
    let mut u: Vec<f64> = (0..n).map(|k| k as f64 - (n as f64 - 1.0) / 2.0).collect();
    for _ in 0..200 {
        let f = net_force(&u);
        let err = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if err < FORCE_TOL {
            return Ok(symmetrize(u));
        }
        let a = axial_hessian(&u);
        let step = a
            .lu()
            .solve(&DVector::from_vec(f))
            .ok_or_else(|| Error::NoConvergence("singular Hessian in position solve".into()))?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(x, s)| x - t * s).collect();
            let ordered = trial.windows(2).all(|w| w[0] < w[1]);
            let trial_err = net_force(&trial).iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if ordered && (trial_err < err || t < 1e-6) {
                u = trial;
                break;
            }
            t *= 0.5;
        }
    }
    Err(Error::NoConvergence(format!("equilibrium positions for {n} ions")))
}

fn symmetrize(mut u: Vec<f64>) -> Vec<f64> {
    let n = u.len();
    for i in 0..n / 2 {
        let c = 0.5 * (u[n - 1 - i] - u[i]);
        u[i] = -c;
        u[n - 1 - i] = c;
    }
    if n % 2 == 1 {
        u[n / 2] = 0.0;
    }
    u
}

/// `A⁻¹` for `n` ions in a harmonic trap: the shape of the coupling matrix.
pub fn dimensionless_couplings(n: usize) -> Result<Couplings> {
    let u = equilibrium_positions(n)?;
    let a = axial_hessian(&u);
    let eig = a.clone().symmetric_eigen();
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v.abs()), hi.max(v.abs())));
    let cond = hi / lo;
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(Error::IllConditioned(cond));
    }
    let inv = a.try_inverse().ok_or(Error::IllConditioned(f64::INFINITY))?;
    let rows = (0..n)
        .map(|j| (0..n).map(|k| 0.5 * (inv[(j, k)] + inv[(k, j)])).collect())
        .collect();
    Couplings::new(rows)
}

/// Spin-spin couplings `J_jk = (g μB b)²/2 · (A⁻¹)_jk` in rad/s, physical ion
/// order. The diagonal (a global phase) is set to zero.
pub fn magic_couplings(spec: &TrapSpec) -> Result<Couplings> {
    spec.validate()?;
    let shape = dimensionless_couplings(spec.n_ions)?;
    let s = spec.coupling_scale();
    let rows = shape
        .rows()
        .into_iter()
        .enumerate()
        .map(|(j, r)| r.into_iter().enumerate().map(|(k, v)| if j == k { 0.0 } else { v * s }).collect())
        .collect();
    Couplings::new(rows)
}

/// `U(τ) = exp(i τ/2 Σ_{j<k} J_jk σz_j σz_k)`.
pub fn free_evolution(j: &Couplings, tau: f64) -> ComplexMatrix {
    let n = j.size();
    let pairs: Vec<_> =
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).map(|(a, b)| (a, b, 0.5 * j.get(a, b))).collect();
    ComplexMatrix::from_diagonal(&zz_phase_diagonal(&pairs, tau, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bisection on the scalar force-balance equation of a symmetric chain.
    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo).signum() == f(mid).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn two_and_three_ion_positions() {
        // two ions at ±c: c = 1/(2c)^2
        let c2 = bisect(|c| c - 1.0 / (4.0 * c * c), 0.1, 2.0);
        let u2 = equilibrium_positions(2).unwrap();
        assert!((u2[1] - c2).abs() < 1e-12 && (u2[0] + c2).abs() < 1e-12);
        assert!((c2 - 0.25f64.cbrt()).abs() < 1e-12);
        // three ions at -c, 0, c: c = 1/c^2 + 1/(2c)^2
        let c3 = bisect(|c| c - 1.0 / (c * c) - 1.0 / (4.0 * c * c), 0.1, 3.0);
        let u3 = equilibrium_positions(3).unwrap();
        assert_eq!(u3[1], 0.0);
        assert!((u3[2] - c3).abs() < 1e-12);
        assert!((c3 - 1.25f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn positions_balance_and_sum_to_zero() {
        for n in 2..=4 {
            let u = equilibrium_positions(n).unwrap();
            assert!(u.iter().sum::<f64>().abs() < 1e-12);
            assert!(net_force(&u).iter().all(|f| f.abs() < 1e-12));
            assert!(u.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn three_ion_hessian() {
        let a = axial_hessian(&equilibrium_positions(3).unwrap());
        let expected = [[2.8, -1.6, -0.2], [-1.6, 4.2, -1.6], [-0.2, -1.6, 2.8]];
        for j in 0..3 {
            for k in 0..3 {
                assert!((a[(j, k)] - expected[j][k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn relabelled_couplings_have_equal_outer_pairs() {
        let j = dimensionless_couplings(3).unwrap().relabel(&[1, 0, 2]).unwrap();
        assert!((j.get(0, 1) - j.get(0, 2)).abs() < 1e-12);
        assert!((j.get(0, 1) - j.get(1, 2)).abs() > 1e-3);
        let two = magic_couplings(&TrapSpec::ytterbium(2)).unwrap();
        assert!(two.get(0, 1) > 0.0);
    }

    #[test]
    fn invalid_trap_spec() {
        let mut spec = TrapSpec::ytterbium(3);
        spec.gradient_b = -1.0;
        assert!(magic_couplings(&spec).is_err());
    }
}
