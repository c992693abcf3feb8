//! Numerical circuit synthesis: a layered ansatz of local gates and
//! entanglers is fitted to a target by restarted local optimization, growing
//! the number of entanglers until a fit is found.

mod ansatz;
mod objective;
mod optimize;
mod template;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use self::ansatz::{build_ansatz, Ansatz, CouplerKind, CouplerModel, FinalLayer, Layout, Substitution};
pub use self::objective::{objective, objective_gradient, residual_jacobian, ObjectiveMode};
pub use self::optimize::{optimize_once, LocalMinimum, OptimizerOptions, StopReason};
pub use self::template::{AngleSlot, Template};
use crate::catalog::TargetGate;
use crate::circuit::{self, Circuit};
use crate::error::{Error, Result};
use crate::gates::gate_matrix;
use crate::tensor::{phase_alignment, raw_distance, ComplexMatrix, C64};

/// Restarts run in blocks of this size; the search at one entangler count
/// stops after the first block containing a converged start. The block size
/// does not depend on the worker count, so results do not either.
pub const RESTART_BLOCK: usize = 8;

/// Local angles below this magnitude count as absent.
pub const ZERO_ANGLE: f64 = 1e-9;

/// A target given by catalog name or as an explicit matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Target {
    Named(String),
    /// Rows of `[re, im]` pairs.
    Inline { matrix: Vec<Vec<[f64; 2]>> },
}

impl Target {
    pub fn gate(g: TargetGate) -> Self {
        Target::Named(g.name().to_string())
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let d = m.dim();
        Target::Inline { matrix: (0..d).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect() }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        match self {
            Target::Named(name) => name.parse::<TargetGate>().map(TargetGate::matrix),
            Target::Inline { matrix } => {
                let rows: Vec<Vec<C64>> =
                    matrix.iter().map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect()).collect();
                ComplexMatrix::from_rows(&rows)
            }
        }
    }
}

fn default_restarts() -> usize {
    200
}

fn default_min_entanglers() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisProblem {
    pub target: Target,
    pub coupler: CouplerModel,
    pub max_entanglers: usize,
    /// First entangler count tried.
    #[serde(default = "default_min_entanglers")]
    pub min_entanglers: usize,
    #[serde(default = "default_restarts")]
    pub restarts_per_count: usize,
    pub tolerance: f64,
    pub seed: u64,
    #[serde(default)]
    pub allow_one_nonglobal: bool,
    #[serde(default)]
    pub final_layer: FinalLayer,
    #[serde(default)]
    pub objective: ObjectiveMode,
}

impl SynthesisProblem {
    pub fn new(target: TargetGate, coupler: CouplerKind, max_entanglers: usize) -> Result<Self> {
        Ok(Self {
            target: Target::gate(target),
            coupler: CouplerModel::standard(coupler)?,
            max_entanglers,
            min_entanglers: 1,
            restarts_per_count: default_restarts(),
            tolerance: 1e-6,
            seed: 42,
            allow_one_nonglobal: false,
            final_layer: FinalLayer::Auto,
            objective: ObjectiveMode::Aligned,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.coupler.validate()?;
        let target = self.target.matrix()?;
        if target.dim() != 1 << self.coupler.n_qubits {
            return Err(Error::DimensionMismatch { left: 1 << self.coupler.n_qubits, right: target.dim() });
        }
        if !target.is_unitary(1e-9) {
            return Err(Error::InvalidParameter("target is not unitary".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        if self.max_entanglers < 1 || self.min_entanglers < 1 || self.min_entanglers > self.max_entanglers {
            return Err(Error::InvalidParameter(format!(
                "entangler range {}..={} is empty",
                self.min_entanglers, self.max_entanglers
            )));
        }
        if self.restarts_per_count == 0 {
            return Err(Error::InvalidParameter("need at least one restart".into()));
        }
        Ok(())
    }

    fn full_final(&self, target: &ComplexMatrix) -> bool {
        match self.final_layer {
            FinalLayer::Full => true,
            FinalLayer::Phases => false,
            FinalLayer::Auto => !target.is_diagonal(1e-12),
        }
    }
}

/// Search outcome for one entangler count and ansatz variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountEvidence {
    pub n_entanglers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substitution: Option<Substitution>,
    pub restarts: usize,
    pub converged_starts: usize,
    /// Smallest phase-aligned distance reached.
    pub best_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisResult {
    #[serde(with = "circuit_json")]
    pub circuit: Circuit,
    pub residual_raw: f64,
    pub residual_aligned: f64,
    pub entangler_count: usize,
    pub restarts_used: usize,
    pub converged: bool,
    pub seed: u64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substitution: Option<Substitution>,
    /// Fitted parameters in ansatz layout order.
    pub params: Vec<f64>,
    pub evidence: Vec<CountEvidence>,
}

mod circuit_json {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(c: &Circuit, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: serde_json::Value =
            serde_json::from_str(&circuit::serialize(c)).map_err(serde::ser::Error::custom)?;
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Circuit, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        circuit::parse(&v.to_string()).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    restart: usize,
    params: Vec<f64>,
    residual: f64,
    nonzero_locals: usize,
}

/// Random stream id for a start; distinct for every (count, variant, restart).
fn stream_id(n_entanglers: usize, variant: usize, restart: usize) -> u64 {
    ((n_entanglers as u64) << 48) | ((variant as u64) << 32) | restart as u64
}

/// Wraps pulse angles into `[-π, π]` and phase and entangler angles into
/// `[-π/2, π/2]`. Each shift by a period only changes the global phase.
fn canonicalize(params: &mut [f64], layout: &Layout, periodic_entangler: bool) {
    let wrap = |x: f64, period: f64| {
        let y = x.rem_euclid(period);
        if y > 0.5 * period {
            y - period
        } else {
            y
        }
    };
    for (i, p) in params.iter_mut().enumerate() {
        if layout.is_entangler(i) {
            if periodic_entangler {
                *p = wrap(*p, PI);
            }
        } else if layout.is_phase(i) {
            *p = wrap(*p, PI);
        } else {
            *p = wrap(*p, 2.0 * PI);
        }
    }
}

fn count_nonzero_locals(params: &[f64], layout: &Layout) -> usize {
    params.iter().enumerate().filter(|(i, p)| !layout.is_entangler(*i) && p.abs() >= ZERO_ANGLE).count()
}

/// Qubit permutations under which both the target and the coupler are invariant.
fn symmetry_group(target: &ComplexMatrix, coupler: &CouplerModel) -> Result<Vec<Vec<usize>>> {
    let n = coupler.n_qubits;
    let (mut probe, _) = coupler.entangler();
    probe.angle = Some(0.377);
    let b = gate_matrix(&probe, n)?;
    let mut out = Vec::new();
    for perm in permutations(n) {
        let p = permutation_matrix(&perm)?;
        let conj = |m: &ComplexMatrix| -> Result<ComplexMatrix> { p.matmul(m)?.matmul(&p.adjoint()) };
        if conj(target)?.approx_eq(target, 1e-12) && conj(&b)?.approx_eq(&b, 1e-12) {
            out.push(perm);
        }
    }
    Ok(out)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out.sort();
    out
}

/// Operator moving the state of qubit `i` to qubit `perm[i]`.
fn permutation_matrix(perm: &[usize]) -> Result<ComplexMatrix> {
    let n = perm.len();
    let d = 1 << n;
    let mut m = ComplexMatrix::zeros(d);
    for b in 0..d {
        let mut image = 0;
        for (i, &pi) in perm.iter().enumerate() {
            if b & (1 << (n - 1 - i)) != 0 {
                image |= 1 << (n - 1 - pi);
            }
        }
        m.as_mut_slice()[image * d + b] = C64::new(1.0, 0.0);
    }
    Ok(m)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..1usize << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|q| m & (1 << q) != 0).collect())
        .collect()
}

/// Proper-subset couplers up to symmetry: pairs first, then triples.
pub fn substitution_choices(target: &ComplexMatrix, coupler: &CouplerModel) -> Result<Vec<Vec<usize>>> {
    let group = symmetry_group(target, coupler)?;
    let n = coupler.n_qubits;
    let mut reps: Vec<Vec<usize>> = Vec::new();
    for k in 2..n {
        let mut seen: Vec<Vec<usize>> = Vec::new();
        for s in subsets(n, k) {
            let orbit_min = group
                .iter()
                .map(|perm| {
                    let mut img: Vec<usize> = s.iter().map(|&q| perm[q]).collect();
                    img.sort();
                    img
                })
                .min()
                .expect("identity is in the group");
            if !seen.contains(&orbit_min) {
                seen.push(orbit_min);
            }
        }
        seen.sort();
        reps.extend(seen);
    }
    Ok(reps)
}

/// Result of running every start of one (count, variant) pair.
struct Sweep {
    best: Option<Candidate>,
    restarts: usize,
    converged_starts: usize,
}

fn sweep(problem: &SynthesisProblem, target: &ComplexMatrix, ansatz: &Ansatz, variant: usize) -> Result<Sweep> {
    let layout = ansatz.layout;
    let n_params = layout.n_params();
    let opts = OptimizerOptions { mode: problem.objective, ..OptimizerOptions::default() };
    let periodic = problem.coupler.kind != CouplerKind::CouplingU;
    let run = |restart: usize| -> Result<Candidate> {
        let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
        rng.set_stream(stream_id(layout.n_entanglers, variant, restart));
        let start: Vec<f64> = (0..n_params).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        let min = optimize_once(&ansatz.template, target, &start, &opts)?;
        let mut params = min.params;
        canonicalize(&mut params, &layout, periodic);
        let u = ansatz.template.instantiate(&params, true)?.evaluate()?;
        let residual = phase_alignment(target, &u)?.distance;
        let nonzero_locals = count_nonzero_locals(&params, &layout);
        Ok(Candidate { restart, params, residual, nonzero_locals })
    };
    let mut best: Option<Candidate> = None;
    let mut converged_starts = 0;
    let mut restarts = 0;
    let mut first = 0;
    while first < problem.restarts_per_count {
        let last = (first + RESTART_BLOCK).min(problem.restarts_per_count);
        let block: Vec<Candidate> = (first..last).into_par_iter().map(run).collect::<Result<_>>()?;
        restarts += block.len();
        for c in block {
            if c.residual < problem.tolerance {
                converged_starts += 1;
            }
            if better(&c, best.as_ref(), problem.tolerance) {
                best = Some(c);
            }
        }
        if converged_starts > 0 {
            break;
        }
        first = last;
    }
    Ok(Sweep { best, restarts, converged_starts })
}

/// Converged candidates beat unconverged ones; among converged, fewer
/// nonzero local angles win, then smaller residual; otherwise smaller
/// residual. Ties keep the earlier restart.
fn better(c: &Candidate, incumbent: Option<&Candidate>, tol: f64) -> bool {
    let Some(b) = incumbent else { return true };
    let (cc, bc) = (c.residual < tol, b.residual < tol);
    let key = |x: &Candidate, conv: bool| {
        if conv {
            (0u8, x.nonzero_locals, x.residual)
        } else {
            (1u8, 0, x.residual)
        }
    };
    let (kc, kb) = (key(c, cc), key(b, bc));
    match kc.partial_cmp(&kb) {
        Some(std::cmp::Ordering::Less) => true,
        Some(std::cmp::Ordering::Equal) => c.restart < b.restart,
        _ => false,
    }
}

/// Grows the entangler count from `min_entanglers` to `max_entanglers` and
/// returns the first converged circuit, or the best attempt overall.
pub fn synthesize(problem: &SynthesisProblem) -> Result<SynthesisResult> {
    problem.validate()?;
    let target = problem.target.matrix()?;
    let full_final = problem.full_final(&target);
    let choices =
        if problem.allow_one_nonglobal { substitution_choices(&target, &problem.coupler)? } else { Vec::new() };
    let mut evidence = Vec::new();
    let mut restarts_used = 0;
    let mut overall: Option<(Candidate, Ansatz)> = None;
    for n_g in problem.min_entanglers..=problem.max_entanglers {
        let mut variants: Vec<Option<Substitution>> = vec![None];
        for position in 0..n_g {
            for qubits in &choices {
                variants.push(Some(Substitution { position, qubits: qubits.clone() }));
            }
        }
        for (variant, substitution) in variants.iter().enumerate() {
            let ansatz = build_ansatz(&problem.coupler, n_g, full_final, substitution.as_ref())?;
            let s = sweep(problem, &target, &ansatz, variant)?;
            restarts_used += s.restarts;
            let best = s.best.expect("at least one restart");
            evidence.push(CountEvidence {
                n_entanglers: n_g,
                substitution: substitution.clone(),
                restarts: s.restarts,
                converged_starts: s.converged_starts,
                best_residual: best.residual,
            });
            let converged = best.residual < problem.tolerance;
            if overall.as_ref().is_none_or(|(o, _)| converged || best.residual < o.residual) {
                overall = Some((best, ansatz));
            }
            if converged {
                return finish(problem, &target, overall.expect("set above"), restarts_used, evidence);
            }
        }
    }
    finish(problem, &target, overall.expect("at least one count"), restarts_used, evidence)
}

fn finish(
    problem: &SynthesisProblem,
    target: &ComplexMatrix,
    (best, ansatz): (Candidate, Ansatz),
    restarts_used: usize,
    evidence: Vec<CountEvidence>,
) -> Result<SynthesisResult> {
    let mut circuit = ansatz.template.instantiate(&best.params, true)?;
    let u = circuit.evaluate()?;
    let aligned = phase_alignment(target, &u)?.distance;
    let raw = raw_distance(target, &u)?;
    circuit.name = Some(match &problem.target {
        Target::Named(name) => format!("{name}-{}-{}", problem.coupler.kind, ansatz.layout.n_entanglers),
        Target::Inline { .. } => format!("inline-{}-{}", problem.coupler.kind, ansatz.layout.n_entanglers),
    });
    circuit.metadata.insert("seed".into(), problem.seed.to_string());
    circuit.metadata.insert("coupler".into(), problem.coupler.kind.to_string());
    if let Some(s) = &ansatz.substitution {
        circuit.metadata.insert("substitution".into(), s.to_string());
    }
    Ok(SynthesisResult {
        entangler_count: circuit.entangler_count(),
        circuit,
        residual_raw: raw,
        residual_aligned: aligned,
        restarts_used,
        converged: aligned < problem.tolerance,
        seed: problem.seed,
        tolerance: problem.tolerance,
        substitution: ansatz.substitution,
        params: best.params,
        evidence,
    })
}

/// Locally refines the free angles of `template` from `start`.
pub fn refine(
    template: &Template,
    target: &ComplexMatrix,
    start: &[f64],
    mode: ObjectiveMode,
) -> Result<(Vec<f64>, f64)> {
    let opts = OptimizerOptions { mode, max_iterations: 2000, ..OptimizerOptions::default() };
    let min = optimize_once(template, target, start, &opts)?;
    let u = template.evaluate(&min.params)?;
    Ok((min.params, phase_alignment(target, &u)?.distance))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_targets_collapse_choices() {
        let ccc = TargetGate::CCCPhase.matrix();
        let gg = CouplerModel::standard(CouplerKind::GlobalGG).unwrap();
        assert_eq!(substitution_choices(&ccc, &gg).unwrap(), vec![vec![0, 1], vec![0, 1, 2]]);
        let fredkin = TargetGate::Fredkin.matrix();
        let g = CouplerModel::standard(CouplerKind::GlobalG).unwrap();
        // swapping qubits 1 and 2 fixes both
        assert_eq!(substitution_choices(&fredkin, &g).unwrap(), vec![vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn permutation_matrix_moves_qubits() {
        let p = permutation_matrix(&[1, 0]).unwrap();
        // |01> -> |10>
        assert_eq!(p[(2, 1)], C64::new(1.0, 0.0));
        assert_eq!(permutations(3).len(), 6);
    }

    #[test]
    fn canonical_angles_keep_the_unitary() {
        let c = CouplerModel::standard(CouplerKind::GlobalG).unwrap();
        let a = build_ansatz(&c, 2, true, None).unwrap();
        let mut x: Vec<f64> = (0..a.layout.n_params()).map(|i| 1.7 * i as f64 - 4.0).collect();
        let before = a.template.evaluate(&x).unwrap();
        canonicalize(&mut x, &a.layout, true);
        let after = a.template.evaluate(&x).unwrap();
        assert!(phase_alignment(&before, &after).unwrap().distance < 1e-12);
        assert!(x.iter().all(|p| p.abs() <= PI + 1e-12));
    }

    #[test]
    fn problem_validation() {
        let mut p = SynthesisProblem::new(TargetGate::CCPhase, CouplerKind::GlobalG, 3).unwrap();
        assert!(p.validate().is_ok());
        p.tolerance = 0.0;
        assert!(p.validate().is_err());
        let p = SynthesisProblem::new(TargetGate::CCCPhase, CouplerKind::GlobalG, 3).unwrap();
        assert!(matches!(p.validate(), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn inline_target_round_trip() {
        let m = TargetGate::Fredkin.matrix();
        let t = Target::from_matrix(&m);
        let json = serde_json::to_string(&t).unwrap();
        let back: Target = serde_json::from_str(&json).unwrap();
        assert_eq!(back.matrix().unwrap(), m);
        let named: Target = serde_json::from_str("\"toffoli\"").unwrap();
        assert_eq!(named, Target::gate(TargetGate::Toffoli));
    }
}
