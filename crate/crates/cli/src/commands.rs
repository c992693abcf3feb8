use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use globalgate::catalog::{self, TargetGate};
use globalgate::circuit::{self, Circuit, VerificationReport};
use globalgate::gates::{gate_matrix, hadamard, Couplings, GateOp};
use globalgate::ion::{
    closed_form_spin_block, dimensionless_couplings, fock_simulate, magic_couplings, sm_propagator,
    BichromaticParams, FockOptions, SpinBasis, TrapSpec,
};
use globalgate::synth::{self, CouplerKind, CouplerModel, SynthesisProblem, Target};
use globalgate::tensor::{kron_all, phase_alignment, ComplexMatrix};
use globalgate::Error;
use serde_json::{json, Value};

use crate::{BichromaticArgs, CouplingsArgs, FockArgs, SynthesizeArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

pub struct Outcome {
    pub exit_code: u8,
    pub text: String,
    pub json: Value,
}

#[derive(Debug)]
pub struct Failure {
    pub exit_code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { exit_code: EXIT_USAGE, message: message.into() }
    }
}

/// Input problems map to the usage code; numerical breakdowns are internal.
impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit_code = match e {
            Error::NoConvergence(_)
            | Error::NonFinite
            | Error::StepInstability(_)
            | Error::IllConditioned(_)
            | Error::Cancelled => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        };
        Self { exit_code, message: e.to_string() }
    }
}

type CmdResult = Result<Outcome, Failure>;

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read_file(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn report_text(r: &VerificationReport) -> String {
    format!(
        "aligned distance: {:.3e}\nraw distance:     {:.3e}\naligning phase:   {}\ntolerance:        {:.1e}\nresult:           {}\n",
        r.aligned_distance,
        r.raw_distance,
        globalgate::angle::format_angle(r.aligning_phase),
        r.tolerance,
        if r.passed { "PASS" } else { "FAIL" }
    )
}

pub fn verify(key: Option<String>, file: Option<PathBuf>, target: Option<String>, tol: Option<f64>) -> CmdResult {
    let (circuit, default_tol) = match (key, file) {
        (Some(k), _) => {
            let e = catalog::catalog_entry(&k)?;
            (e.circuit, e.tolerance)
        }
        (None, Some(path)) => (circuit::parse(&read_file(&path)?)?, globalgate::tensor::DEFAULT_TOL),
        (None, None) => return Err(Failure::usage("give --catalog or --circuit")),
    };
    let target_name = target
        .or_else(|| circuit.metadata.get("target").cloned())
        .ok_or_else(|| Failure::usage("no --target given and the circuit records none"))?;
    let target_gate: TargetGate = target_name.parse()?;
    if target_gate.n_qubits() != circuit.n_qubits() {
        return Err(Failure::usage(format!(
            "target {target_gate} acts on {} qubits, circuit on {}",
            target_gate.n_qubits(),
            circuit.n_qubits()
        )));
    }
    let tol = tol.unwrap_or(default_tol);
    let report = circuit.verify(&target_gate.matrix(), tol)?;
    let mut text = String::new();
    let name = circuit.name.as_deref().unwrap_or("circuit");
    let _ = writeln!(text, "{name} vs {target_gate}: {} ops, {} entanglers", circuit.len(), circuit.entangler_count());
    text.push_str(&report_text(&report));
    for (k, v) in &circuit.metadata {
        if k != "target" {
            let _ = writeln!(text, "{k}: {v}");
        }
    }
    Ok(Outcome {
        exit_code: if report.passed { EXIT_OK } else { EXIT_FAILED },
        text,
        json: json!({
            "circuit": name,
            "target": target_gate.name(),
            "entanglers": circuit.entangler_count(),
            "report": report,
            "metadata": circuit.metadata,
        }),
    })
}

fn coupler_from_args(kind: &str, couplings: Option<&str>) -> Result<CouplerModel, Failure> {
    let kind: CouplerKind = kind.parse()?;
    match (kind, couplings) {
        (CouplerKind::CouplingU, Some("harmonic")) => Ok(CouplerModel::with_couplings(catalog::unequal_j_couplings()?)?),
        (CouplerKind::CouplingU, Some(path)) => {
            let j: Couplings = read_json(Path::new(path))?;
            Ok(CouplerModel::with_couplings(j)?)
        }
        (CouplerKind::CouplingU, None) => Err(Failure::usage("coupling-u needs --couplings")),
        (_, Some(_)) => Err(Failure::usage("--couplings only applies to coupling-u")),
        (k, None) => Ok(CouplerModel::standard(k)?),
    }
}

pub fn synthesize(a: SynthesizeArgs) -> CmdResult {
    let problem = match &a.problem {
        Some(path) => read_json::<SynthesisProblem>(path)?,
        None => {
            let target = a.target.clone().expect("required by clap");
            target.parse::<TargetGate>()?;
            SynthesisProblem {
                target: Target::Named(target),
                coupler: coupler_from_args(a.coupler.as_deref().expect("required by clap"), a.couplings.as_deref())?,
                max_entanglers: a.max_gates,
                min_entanglers: a.min_gates,
                restarts_per_count: a.restarts,
                tolerance: a.tol,
                seed: a.seed,
                allow_one_nonglobal: a.allow_one_nonglobal,
                final_layer: a.final_layer.parse()?,
                objective: match a.objective.as_str() {
                    "aligned" => synth::ObjectiveMode::Aligned,
                    "raw" => synth::ObjectiveMode::Raw,
                    other => return Err(Failure::usage(format!("unknown objective `{other}`"))),
                },
            }
        }
    };
    let result = synth::synthesize(&problem)?;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "seed {}, coupler {}, tolerance {:.1e}",
        problem.seed, problem.coupler.kind, problem.tolerance
    );
    for e in &result.evidence {
        let variant = e.substitution.as_ref().map(|s| format!(" ({s})")).unwrap_or_default();
        let _ = writeln!(
            text,
            "  {} entanglers{variant}: {} restarts, {} converged, best distance {:.3e}",
            e.n_entanglers, e.restarts, e.converged_starts, e.best_residual
        );
    }
    let _ = writeln!(text, "converged:        {}", result.converged);
    let _ = writeln!(text, "entanglers:       {}", result.entangler_count);
    let _ = writeln!(text, "aligned distance: {:.3e}", result.residual_aligned);
    let _ = writeln!(text, "raw distance:     {:.3e}", result.residual_raw);
    let _ = writeln!(text, "restarts used:    {}", result.restarts_used);
    if result.converged {
        if let Some(out) = &a.out {
            write_file(out, &circuit::serialize(&result.circuit))?;
            let _ = writeln!(text, "circuit written to {}", out.display());
        }
        text.push('\n');
        for op in result.circuit.ops() {
            let _ = writeln!(text, "  {op}");
        }
    }
    Ok(Outcome {
        exit_code: if result.converged { EXIT_OK } else { EXIT_FAILED },
        text,
        json: serde_json::to_value(&result).map_err(|e| Failure { exit_code: EXIT_INTERNAL, message: e.to_string() })?,
    })
}

fn parse_perm(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Failure::usage(format!("bad permutation entry `{t}`"))))
        .collect()
}

fn table(rows: &[Vec<f64>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(|v| format!("{v:>12.6}")).collect::<Vec<_>>().join(" ") + "\n")
        .collect()
}

pub fn couplings(a: CouplingsArgs) -> CmdResult {
    let spec = match &a.config {
        Some(path) => read_json::<TrapSpec>(path)?,
        None => TrapSpec::ytterbium(a.ions),
    };
    let physical = magic_couplings(&spec)?;
    let shape = dimensionless_couplings(spec.n_ions)?;
    let perm = match (&a.relabel, spec.n_ions) {
        (Some(p), _) => Some(parse_perm(p)?),
        (None, 3) => Some(catalog::UNEQUAL_J_RELABEL.to_vec()),
        (None, _) => None,
    };
    let mut text = String::new();
    let _ = writeln!(text, "{} ions, coupling scale {:.6e} rad/s", spec.n_ions, spec.coupling_scale());
    let _ = writeln!(text, "J (rad/s), trap order:");
    text.push_str(&table(&physical.rows()));
    let _ = writeln!(text, "shape (inverse axial Hessian), trap order:");
    text.push_str(&table(&shape.rows()));
    let mut report = json!({
        "n_ions": spec.n_ions,
        "coupling_scale": spec.coupling_scale(),
        "couplings": physical,
        "shape": shape,
    });
    if let Some(perm) = perm {
        let relabelled = physical.relabel(&perm)?;
        let _ = writeln!(text, "J (rad/s), relabelled {perm:?}:");
        text.push_str(&table(&relabelled.rows()));
        if spec.n_ions == 3 {
            let _ = writeln!(
                text,
                "J12 = {:.6}, J13 = {:.6}, J23 = {:.6}, J23/J12 = {:.6}",
                relabelled.get(0, 1),
                relabelled.get(0, 2),
                relabelled.get(1, 2),
                relabelled.get(1, 2) / relabelled.get(0, 1)
            );
            report["ratio_23_12"] = json!(relabelled.get(1, 2) / relabelled.get(0, 1));
        }
        report["relabel"] = json!(perm);
        report["relabelled"] = json!(relabelled);
    }
    if let Some(out) = &a.out {
        write_file(out, &serde_json::to_string_pretty(&report).expect("serializable"))?;
    }
    Ok(Outcome { exit_code: EXIT_OK, text, json: report })
}

fn bichromatic_params(a: &BichromaticArgs) -> Result<BichromaticParams, Failure> {
    let p = match &a.config {
        Some(path) => read_json::<BichromaticParams>(path)?,
        None => BichromaticParams::new(a.g, a.delta, a.ions, a.basis.parse()?)?.with_cutoff(a.cutoff),
    };
    p.validate()?;
    Ok(p)
}

/// The global gate `exp(iφ Σ σzσz)` on `n` qubits, rotated into the drive basis.
fn global_gate(n: usize, phi: f64, basis: SpinBasis) -> Result<ComplexMatrix, Failure> {
    let op = match n {
        2 => GateOp::pair_zz(0, 1, phi),
        3 => GateOp::global_g([0, 1, 2], phi),
        _ => GateOp::global_gg([0, 1, 2, 3], phi),
    };
    let g = gate_matrix(&op, n)?;
    Ok(match basis {
        SpinBasis::Z => g,
        SpinBasis::X => {
            let h = hadamard();
            let hn = kron_all(std::iter::repeat_n(&h, n));
            &(&hn * &g) * &hn
        }
    })
}

fn matrix_text(m: &ComplexMatrix) -> String {
    let d = m.dim();
    (0..d)
        .map(|i| {
            m.row(i).iter().map(|z| format!("{:>8.4}{:+.4}i", z.re, z.im)).collect::<Vec<_>>().join(" ") + "\n"
        })
        .collect()
}

pub fn sm_gate(a: BichromaticArgs) -> CmdResult {
    let p = bichromatic_params(&a)?;
    let u = sm_propagator(&p)?;
    let phi = p.entangling_angle();
    let reference = global_gate(p.n_ions, phi, p.basis)?;
    let align = phase_alignment(&reference, &u)?;
    if let Some(out) = &a.out {
        write_file(out, &u.to_text())?;
    }
    let mut text = String::new();
    let _ = writeln!(text, "gate time:        {:.6}", p.gate_time());
    let _ = writeln!(text, "entangling angle: {}", globalgate::angle::format_angle(phi));
    let _ = writeln!(text, "global phase:     {:.6}", p.global_phase());
    let _ = writeln!(text, "distance to global gate (up to phase): {:.3e}", align.distance);
    text.push_str(&matrix_text(&u));
    Ok(Outcome {
        exit_code: EXIT_OK,
        text,
        json: json!({
            "params": p,
            "gate_time": p.gate_time(),
            "entangling_angle": phi,
            "global_phase": p.global_phase(),
            "distance_to_global_gate": align.distance,
            "matrix": synth::Target::from_matrix(&u),
        }),
    })
}

pub fn fock_check(a: FockArgs) -> CmdResult {
    let p = bichromatic_params(&a.params)?;
    let opts = FockOptions { steps: a.steps, ..FockOptions::default() };
    let t = p.gate_time();
    let full = fock_simulate(&p, t, a.fock, opts)?;
    let deviation = full.spin_block().max_abs_diff(&sm_propagator(&p)?)?;
    let half = fock_simulate(&p, 0.5 * t, a.fock, opts)?;
    let half_deviation = half.spin_block().max_abs_diff(&closed_form_spin_block(&p, 0.5 * t, a.fock)?)?;
    let mut ground = vec![globalgate::C64::new(0.0, 0.0); 1 << p.n_ions];
    ground[0] = globalgate::C64::new(1.0, 0.0);
    let purity = full.motional_purity(&ground);
    let half_purity = half.motional_purity(&ground);
    let passed = deviation < a.tol && half_deviation < a.tol;
    let mut text = String::new();
    let _ = writeln!(text, "steps per run:             {}", full.steps);
    let _ = writeln!(text, "deviation at 2π/δ:         {deviation:.3e}");
    let _ = writeln!(text, "deviation at π/δ:          {half_deviation:.3e}");
    let _ = writeln!(text, "motional purity at 2π/δ:   {purity:.12}");
    let _ = writeln!(text, "motional purity at π/δ:    {half_purity:.6}");
    let _ = writeln!(text, "top-level population:      {:.3e}", full.max_upper_population.max(half.max_upper_population));
    let _ = writeln!(text, "norm drift:                {:.3e}", full.norm_drift);
    let _ = writeln!(text, "result:                    {}", if passed { "PASS" } else { "FAIL" });
    if let Some(out) = &a.params.out {
        write_file(out, &full.spin_block().to_text())?;
    }
    Ok(Outcome {
        exit_code: if passed { EXIT_OK } else { EXIT_FAILED },
        text,
        json: json!({
            "params": p,
            "steps": full.steps,
            "deviation": deviation,
            "half_period_deviation": half_deviation,
            "purity": purity,
            "half_period_purity": half_purity,
            "max_upper_population": full.max_upper_population.max(half.max_upper_population),
            "norm_drift": full.norm_drift,
            "passed": passed,
        }),
    })
}

pub fn export(key: &str, out: Option<PathBuf>) -> CmdResult {
    let c: Circuit = catalog::catalog_circuit(key)?;
    let doc = circuit::serialize(&c);
    let text = match &out {
        Some(path) => {
            write_file(path, &doc)?;
            format!("wrote {} ({} ops)\n", path.display(), c.len())
        }
        None => doc.clone(),
    };
    Ok(Outcome { exit_code: EXIT_OK, text, json: serde_json::from_str(&doc).expect("serializer emits JSON") })
}

pub fn catalog() -> CmdResult {
    let mut text = String::new();
    let mut rows = Vec::new();
    for e in catalog::all_entries()? {
        let r = e.circuit.verify(&e.target.matrix(), e.tolerance)?;
        let _ = writeln!(
            text,
            "{:<24} {:<9} {} qubits  {:>2} entanglers  {:>2} ops  distance {:.2e}",
            e.key,
            e.target,
            e.circuit.n_qubits(),
            e.circuit.entangler_count(),
            e.circuit.len(),
            r.aligned_distance
        );
        rows.push(json!({
            "key": e.key,
            "target": e.target.name(),
            "entanglers": e.circuit.entangler_count(),
            "ops": e.circuit.len(),
            "aligned_distance": r.aligned_distance,
            "tolerance": e.tolerance,
        }));
    }
    Ok(Outcome { exit_code: EXIT_OK, text, json: Value::Array(rows) })
}
