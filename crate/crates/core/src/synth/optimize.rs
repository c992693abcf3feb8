//! Damped Gauss–Newton (Levenberg–Marquardt) descent on the objective.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::objective::{objective, residual_jacobian, ObjectiveMode};
use super::template::Template;
use crate::error::{Error, Result};
use crate::tensor::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    pub mode: ObjectiveMode,
    pub max_iterations: usize,
    /// Stop once the gradient's largest component falls below this.
    pub gradient_tol: f64,
    /// Stop once the objective falls below this.
    pub objective_floor: f64,
    /// Stop when the objective improved by less than `stall_ratio` (relative)
    /// over the last `stall_window` iterations.
    pub stall_window: usize,
    pub stall_ratio: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            mode: ObjectiveMode::Aligned,
            max_iterations: 500,
            gradient_tol: 1e-10,
            objective_floor: 1e-28,
            stall_window: 20,
            stall_ratio: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Gradient,
    Floor,
    MaxIterations,
    Stalled,
    Damping,
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalMinimum {
    pub params: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub stop: StopReason,
}

const HALVINGS: usize = 2;
const MAX_DAMPING: f64 = 1e16;

/// Runs the descent from `start` and returns the best point visited. Every
/// accepted step strictly lowers the objective.
pub fn optimize_once(
    t: &Template,
    target: &ComplexMatrix,
    start: &[f64],
    opts: &OptimizerOptions,
) -> Result<LocalMinimum> {
    if start.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mode = opts.mode;
    let mut x = start.to_vec();
    let p = x.len();
    let (mut r, mut cols) = residual_jacobian(t, &x, target, mode)?;
    let mut f: f64 = r.iter().map(|v| v * v).sum();
    if !f.is_finite() {
        return Ok(LocalMinimum { params: x, objective: f, iterations: 0, stop: StopReason::NonFinite });
    }
    let mut history = vec![f];
    let mut mu = -1.0;
    let mut nu = 2.0;
    for iter in 0..opts.max_iterations {
        if f < opts.objective_floor {
            return Ok(LocalMinimum { params: x, objective: f, iterations: iter, stop: StopReason::Floor });
        }
        let jac = DMatrix::from_fn(r.len(), p, |i, k| cols[k][i]);
        let res = DVector::from_vec(r.clone());
        let grad = jac.tr_mul(&res);
        if 2.0 * grad.amax() < opts.gradient_tol {
            return Ok(LocalMinimum { params: x, objective: f, iterations: iter, stop: StopReason::Gradient });
        }
        let normal = jac.tr_mul(&jac);
        if mu < 0.0 {
            mu = 1e-3 * normal.diagonal().max().max(1e-12);
        }
        let mut accepted = None;
        let mut damped = normal.clone();
        for i in 0..p {
            damped[(i, i)] += mu;
        }
        if let Some(chol) = damped.cholesky() {
            let step = -chol.solve(&grad);
            // predicted decrease of the quadratic model
            let predicted = step.dot(&(step.scale(mu) - &grad));
            let mut scale = 1.0;
            for _ in 0..=HALVINGS {
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + scale * s).collect();
                let ft = objective(t, &trial, target, mode)?;
                if ft.is_finite() && ft < f {
                    let rho = if scale == 1.0 && predicted > 0.0 { (f - ft) / predicted } else { 0.0 };
                    accepted = Some((trial, rho));
                    break;
                }
                if !ft.is_finite() {
                    break;
                }
                scale *= 0.5;
            }
        }
        match accepted {
            Some((trial, rho)) => {
                if rho > 0.0 {
                    mu *= (1.0 - (2.0 * rho - 1.0).powi(3)).max(1.0 / 3.0);
                    nu = 2.0;
                }
                x = trial;
                (r, cols) = residual_jacobian(t, &x, target, mode)?;
                f = r.iter().map(|v| v * v).sum();
                history.push(f);
                let w = opts.stall_window;
                if history.len() > w {
                    let old = history[history.len() - 1 - w];
                    if old - f < opts.stall_ratio * old {
                        return Ok(LocalMinimum { params: x, objective: f, iterations: iter + 1, stop: StopReason::Stalled });
                    }
                }
            }
            None => {
                mu *= nu;
                nu *= 2.0;
                if !mu.is_finite() || mu > MAX_DAMPING {
                    return Ok(LocalMinimum { params: x, objective: f, iterations: iter + 1, stop: StopReason::Damping });
                }
            }
        }
    }
    Ok(LocalMinimum { params: x, objective: f, iterations: opts.max_iterations, stop: StopReason::MaxIterations })
}
