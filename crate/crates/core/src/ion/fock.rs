//! Direct integration of the bichromatic interaction on a truncated
//! spin ⊗ Fock space, used as an independent check of the closed forms.
//!
//! `H(t) = g Σ_k σ_k^β (a† e^{iδt} + a e^{-iδt})` with a single
//! centre-of-mass mode and uniform coupling.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicBool, Ordering};

use crate::error::{Error, Result};
use crate::ion::bichromatic::{BichromaticParams, SpinBasis};
use crate::tensor::{ComplexMatrix, C64, ZERO};

const DEFAULT_STEPS_PER_PERIOD: f64 = 1000.0;
const CUTOFF_POPULATION_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct FockOptions<'a> {
    /// Fixed number of RK4 steps; defaults to 1000 per period `2π/δ`.
    pub steps: Option<usize>,
    /// Largest tolerated deviation of any column norm from 1.
    pub max_norm_drift: f64,
    /// Checked between steps; setting it aborts with [`Error::Cancelled`].
    pub cancel: Option<&'a AtomicBool>,
}

impl Default for FockOptions<'_> {
    fn default() -> Self {
        Self { steps: None, max_norm_drift: 1e-8, cancel: None }
    }
}

/// Final states for every computational spin input with the motion in `|n0>`.
#[derive(Debug, Clone)]
pub struct FockEvolution {
    pub n_ions: usize,
    pub cutoff: usize,
    pub initial_fock: usize,
    pub time: f64,
    pub steps: usize,
    /// Largest population seen in the top two Fock levels.
    pub max_upper_population: f64,
    pub norm_drift: f64,
    columns: Vec<Vec<C64>>,
}

impl FockEvolution {
    fn spin_dim(&self) -> usize {
        1 << self.n_ions
    }

    /// `<s'|<n0| U |n0>|s>`.
    pub fn spin_block(&self) -> ComplexMatrix {
        let d = self.spin_dim();
        let mut m = ComplexMatrix::zeros(d);
        for (s, col) in self.columns.iter().enumerate() {
            for sp in 0..d {
                m[(sp, s)] = col[sp * self.cutoff + self.initial_fock];
            }
        }
        m
    }

    /// Joint final state for an initial spin superposition.
    pub fn final_state(&self, spin_state: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.spin_dim() * self.cutoff];
        for (c, col) in spin_state.iter().zip(&self.columns) {
            for (o, x) in out.iter_mut().zip(col) {
                *o += c * x;
            }
        }
        out
    }

    /// `Tr ρ_motion²` after evolving `spin_state ⊗ |n0>`.
    pub fn motional_purity(&self, spin_state: &[C64]) -> f64 {
        let psi = self.final_state(spin_state);
        let (d, nc) = (self.spin_dim(), self.cutoff);
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let mut purity = 0.0;
        for n in 0..nc {
            for m in 0..nc {
                let rho: C64 = (0..d).map(|s| psi[s * nc + n] * psi[s * nc + m].conj()).sum();
                purity += rho.norm_sqr();
            }
        }
        purity / (norm * norm)
    }
}

struct Integrator {
    g: f64,
    delta: f64,
    n_ions: usize,
    cutoff: usize,
    basis: SpinBasis,
    sqrt: Vec<f64>,
}

impl Integrator {
    /// `out = -i H(t) psi`.
    fn derivative(&self, t: f64, psi: &[C64], out: &mut [C64]) {
        let nc = self.cutoff;
        let d = 1usize << self.n_ions;
        let up = C64::from_polar(1.0, self.delta * t);
        let down = up.conj();
        // motion operator applied per spin block
        let mut moved = vec![ZERO; psi.len()];
        for s in 0..d {
            let block = &psi[s * nc..(s + 1) * nc];
            let target = &mut moved[s * nc..(s + 1) * nc];
            for n in 0..nc {
                let mut v = ZERO;
                if n > 0 {
                    v += up * self.sqrt[n] * block[n - 1];
                }
                if n + 1 < nc {
                    v += down * self.sqrt[n + 1] * block[n + 1];
                }
                target[n] = v;
            }
        }
        let minus_i_g = C64::new(0.0, -self.g);
        out.iter_mut().for_each(|o| *o = ZERO);
        for k in 0..self.n_ions {
            let mask = 1usize << (self.n_ions - 1 - k);
            for s in 0..d {
                match self.basis {
                    SpinBasis::X => {
                        let src = s ^ mask;
                        for n in 0..nc {
                            out[s * nc + n] += minus_i_g * moved[src * nc + n];
                        }
                    }
                    SpinBasis::Z => {
                        let sign = if s & mask == 0 { 1.0 } else { -1.0 };
                        for n in 0..nc {
                            out[s * nc + n] += minus_i_g * sign * moved[s * nc + n];
                        }
                    }
                }
            }
        }
    }

    fn rk4_step(&self, t: f64, h: f64, psi: &mut [C64], scratch: &mut [Vec<C64>; 5]) {
        let [k1, k2, k3, k4, tmp] = scratch;
        self.derivative(t, psi, k1);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k1[i] * (0.5 * h);
        }
        self.derivative(t + 0.5 * h, tmp, k2);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k2[i] * (0.5 * h);
        }
        self.derivative(t + 0.5 * h, tmp, k3);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k3[i] * h;
        }
        self.derivative(t + h, tmp, k4);
        for i in 0..psi.len() {
            psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }
}

/// Integrates the interaction for time `t` starting from every computational
/// spin state with the motion in Fock state `initial_fock`.
pub fn fock_simulate(
    p: &BichromaticParams,
    t: f64,
    initial_fock: usize,
    opts: FockOptions<'_>,
) -> Result<FockEvolution> {
    p.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("evolution time must be nonnegative, got {t}")));
    }
    let cutoff = p.fock_cutoff;
    if initial_fock + 2 >= cutoff {
        return Err(Error::CutoffViolation { population: 1.0, level: initial_fock });
    }
    let steps = opts.steps.unwrap_or_else(|| {
        (t * p.delta.abs() / (2.0 * PI) * DEFAULT_STEPS_PER_PERIOD).ceil().max(1.0) as usize
    });
    if steps == 0 {
        return Err(Error::InvalidParameter("step count must be positive".into()));
    }
    let h = t / steps as f64;
    let integ = Integrator {
        g: p.g,
        delta: p.delta,
        n_ions: p.n_ions,
        cutoff,
        basis: p.basis,
        sqrt: (0..=cutoff).map(|n| (n as f64).sqrt()).collect(),
    };
    let d = 1usize << p.n_ions;
    let len = d * cutoff;
    let mut columns: Vec<Vec<C64>> = (0..d)
        .map(|s| {
            let mut v = vec![ZERO; len];
            v[s * cutoff + initial_fock] = C64::new(1.0, 0.0);
            v
        })
        .collect();
    let mut scratch: [Vec<C64>; 5] = std::array::from_fn(|_| vec![ZERO; len]);
    let upper_level = cutoff - 2;
    let mut max_upper = 0.0f64;
    for step in 0..steps {
        if opts.cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
            return Err(Error::Cancelled);
        }
        let time = step as f64 * h;
        for col in columns.iter_mut() {
            integ.rk4_step(time, h, col, &mut scratch);
            let upper: f64 = (0..d)
                .flat_map(|s| (upper_level..cutoff).map(move |n| s * cutoff + n))
                .map(|i| col[i].norm_sqr())
                .sum();
            max_upper = max_upper.max(upper);
        }
        if max_upper >= CUTOFF_POPULATION_LIMIT {
            return Err(Error::CutoffViolation { population: max_upper, level: upper_level });
        }
    }
    let norm_drift = columns
        .iter()
        .map(|c| (c.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    if norm_drift > opts.max_norm_drift {
        return Err(Error::StepInstability(norm_drift));
    }
    Ok(FockEvolution {
        n_ions: p.n_ions,
        cutoff,
        initial_fock,
        time: t,
        steps,
        max_upper_population: max_upper,
        norm_drift,
        columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ion::bichromatic::{closed_form_spin_block, sm_propagator};

    fn ground_spin(n: usize) -> Vec<C64> {
        let mut v = vec![ZERO; 1 << n];
        v[0] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn zero_coupling_is_identity() {
        let p = BichromaticParams::new(0.0, 1.0, 2, SpinBasis::X).unwrap().with_cutoff(6);
        let evo = fock_simulate(&p, 3.0, 1, FockOptions::default()).unwrap();
        assert!(evo.spin_block().approx_eq(&ComplexMatrix::identity(4), 1e-15));
        assert!((evo.motional_purity(&ground_spin(2)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gate_time_matches_closed_form() {
        for basis in [SpinBasis::X, SpinBasis::Z] {
            let p = BichromaticParams::new(0.1, 1.0, 3, basis).unwrap();
            let evo = fock_simulate(&p, p.gate_time(), 0, FockOptions::default()).unwrap();
            let dev = evo.spin_block().max_abs_diff(&sm_propagator(&p).unwrap()).unwrap();
            assert!(dev < 1e-6, "{basis:?}: {dev}");
            assert!(evo.motional_purity(&ground_spin(3)) > 1.0 - 1e-6);
        }
    }

    #[test]
    fn half_period_entangles() {
        let p = BichromaticParams::new(0.1, 1.0, 3, SpinBasis::X).unwrap();
        let evo = fock_simulate(&p, 0.5 * p.gate_time(), 0, FockOptions::default()).unwrap();
        assert!(evo.motional_purity(&ground_spin(3)) < 1.0 - 1e-3);
        let closed = closed_form_spin_block(&p, evo.time, 0).unwrap();
        assert!(evo.spin_block().max_abs_diff(&closed).unwrap() < 1e-6);
    }

    #[test]
    fn small_cutoff_is_reported() {
        let p = BichromaticParams::new(0.5, 1.0, 3, SpinBasis::X).unwrap().with_cutoff(4);
        assert!(matches!(
            fock_simulate(&p, p.gate_time(), 0, FockOptions::default()),
            Err(Error::CutoffViolation { .. })
        ));
    }

    #[test]
    fn cancellation() {
        let flag = AtomicBool::new(true);
        let p = BichromaticParams::new(0.1, 1.0, 2, SpinBasis::X).unwrap();
        let opts = FockOptions { cancel: Some(&flag), ..FockOptions::default() };
        assert_eq!(fock_simulate(&p, 1.0, 0, opts).unwrap_err(), Error::Cancelled);
    }
}
