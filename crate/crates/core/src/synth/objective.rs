//! Smooth distance between a parametrized circuit and a target.

use serde::{Deserialize, Serialize};

use super::template::Template;
use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, C64, ONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveMode {
    /// `Σ |F - e^{-iθ*} U|²` with `θ* = arg tr(F† U)`.
    #[default]
    Aligned,
    /// `Σ |F - U|²`.
    Raw,
}

/// Overlaps below this are treated as having no preferred phase.
const MIN_OVERLAP: f64 = 1e-12;

fn check_target(t: &Template, target: &ComplexMatrix) -> Result<()> {
    if target.dim() != t.dim() {
        return Err(Error::DimensionMismatch { left: t.dim(), right: target.dim() });
    }
    Ok(())
}

fn overlap(target: &ComplexMatrix, u: &ComplexMatrix) -> C64 {
    target.inner(u)
}

fn alignment(target: &ComplexMatrix, u: &ComplexMatrix, mode: ObjectiveMode) -> (C64, C64) {
    let t = overlap(target, u);
    let w = match mode {
        ObjectiveMode::Aligned if t.norm() > MIN_OVERLAP => t.conj() / t.norm(),
        _ => ONE,
    };
    (t, w)
}

/// Objective value at `params`.
pub fn objective(t: &Template, params: &[f64], target: &ComplexMatrix, mode: ObjectiveMode) -> Result<f64> {
    check_target(t, target)?;
    let u = t.evaluate(params)?;
    let (_, w) = alignment(target, &u, mode);
    Ok(u.as_slice().iter().zip(target.as_slice()).map(|(a, f)| (w * a - f).norm_sqr()).sum())
}

/// Residual vector `(Re r, Im r)` with `r = w U - F`, and its Jacobian by
/// columns (one per parameter).
pub fn residual_jacobian(
    t: &Template,
    params: &[f64],
    target: &ComplexMatrix,
    mode: ObjectiveMode,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    check_target(t, target)?;
    let (u, grads) = t.evaluate_with_jacobian(params)?;
    let (ov, w) = alignment(target, &u, mode);
    let aligned = mode == ObjectiveMode::Aligned && ov.norm() > MIN_OVERLAP;
    let split = |z: &mut dyn Iterator<Item = C64>| {
        let v: Vec<C64> = z.collect();
        v.iter().map(|c| c.re).chain(v.iter().map(|c| c.im)).collect::<Vec<f64>>()
    };
    let r = split(&mut u.as_slice().iter().zip(target.as_slice()).map(|(a, f)| w * a - f));
    let cols = grads
        .iter()
        .map(|du| {
            // d(wU) = w (dU - i dθ U) with dθ = Im(dt/t)
            let dtheta = if aligned { (overlap(target, du) / ov).im } else { 0.0 };
            let shift = C64::new(0.0, -dtheta);
            split(&mut du.as_slice().iter().zip(u.as_slice()).map(|(d, a)| w * (d + shift * a)))
        })
        .collect();
    Ok((r, cols))
}

/// Objective value and its gradient.
pub fn objective_gradient(
    t: &Template,
    params: &[f64],
    target: &ComplexMatrix,
    mode: ObjectiveMode,
) -> Result<(f64, Vec<f64>)> {
    let (r, cols) = residual_jacobian(t, params, target, mode)?;
    let f = r.iter().map(|x| x * x).sum();
    let g = cols.iter().map(|c| 2.0 * c.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>()).collect();
    Ok((f, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::TargetGate;
    use crate::gates::GateOp;

    #[test]
    fn identity_against_ccphase() {
        let mut t = Template::new(3).unwrap();
        t.push_free(GateOp::phase(0, 0.0), 0, 1.0).unwrap();
        let f = TargetGate::CCPhase.matrix();
        assert_eq!(objective(&t, &[0.0], &f, ObjectiveMode::Aligned).unwrap(), 4.0);
        assert_eq!(objective(&t, &[0.0], &f, ObjectiveMode::Raw).unwrap(), 4.0);
    }

    #[test]
    fn alignment_removes_global_phase() {
        // Phase(π/2) = diag(-i, i) = -i Z
        let mut t = Template::new(1).unwrap();
        t.push_free(GateOp::phase(0, 0.0), 0, 1.0).unwrap();
        let z = crate::gates::pauli_z();
        let half_pi = std::f64::consts::FRAC_PI_2;
        assert!(objective(&t, &[half_pi], &z, ObjectiveMode::Aligned).unwrap() < 1e-28);
        assert!((objective(&t, &[half_pi], &z, ObjectiveMode::Raw).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut t = Template::new(2).unwrap();
        t.push_free(GateOp::pulse(0, 0.0), 0, 1.0).unwrap();
        t.push_free(GateOp::pair_zz(0, 1, 0.0), 1, 1.0).unwrap();
        t.push_free(GateOp::phase(1, 0.0), 2, 1.0).unwrap();
        t.push_free(GateOp::pulse(1, 0.0), 3, 1.0).unwrap();
        let f = TargetGate::Cnot.matrix();
        for mode in [ObjectiveMode::Aligned, ObjectiveMode::Raw] {
            let x = [0.4, 1.3, -0.2, 2.2];
            let (_, g) = objective_gradient(&t, &x, &f, mode).unwrap();
            for i in 0..x.len() {
                let h = 1e-5;
                let (mut up, mut down) = (x, x);
                up[i] += h;
                down[i] -= h;
                let fd = (objective(&t, &up, &f, mode).unwrap() - objective(&t, &down, &f, mode).unwrap()) / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-7 * g[i].abs().max(1.0), "{mode:?} {i}");
            }
        }
    }
}
