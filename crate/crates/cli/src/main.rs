mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Outcome;

/// Build, verify and synthesize few-qubit circuits from global entangling gates.
#[derive(Debug, Parser)]
#[command(name = "globalgate", version)]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare a circuit against a target gate.
    Verify(VerifyArgs),
    /// Search for a circuit realizing a target with a given entangler.
    Synthesize(SynthesizeArgs),
    /// Trapped-ion computations.
    #[command(subcommand)]
    Physics(PhysicsCommand),
    /// Write a catalog circuit to a file.
    Export(ExportArgs),
    /// List catalog entries.
    Catalog,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
struct Source {
    /// Catalog key.
    #[arg(long)]
    catalog: Option<String>,
    /// Circuit file.
    #[arg(long)]
    circuit: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    /// Target gate name; defaults to the circuit's recorded target.
    #[arg(long)]
    target: Option<String>,
    /// Pass threshold on the phase-aligned distance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct SynthesizeArgs {
    /// Target gate name (`toffoli`, `ccphase`, `cccphase`, `fredkin`, ...).
    #[arg(long, required_unless_present = "problem")]
    target: Option<String>,
    /// `global-g`, `global-gg`, `nearest-n` or `coupling-u`.
    #[arg(long, required_unless_present = "problem")]
    coupler: Option<String>,
    /// Coupling matrix for `coupling-u`: a JSON file, or `harmonic` for the
    /// three-ion trap shape with the middle ion first.
    #[arg(long)]
    couplings: Option<String>,
    #[arg(long, default_value_t = 6)]
    max_gates: usize,
    #[arg(long, default_value_t = 1)]
    min_gates: usize,
    #[arg(long, default_value_t = 200)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    allow_one_nonglobal: bool,
    /// `auto`, `phases` or `full`.
    #[arg(long, default_value = "auto")]
    final_layer: String,
    /// `aligned` or `raw`.
    #[arg(long, default_value = "aligned")]
    objective: String,
    /// Read the whole problem from a JSON file instead of flags.
    #[arg(long, conflicts_with_all = ["target", "coupler"])]
    problem: Option<PathBuf>,
    /// Where to write the circuit when the search converges.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum PhysicsCommand {
    /// Magnetic-gradient spin-spin couplings of a harmonic ion chain.
    Couplings(CouplingsArgs),
    /// Closed-form bichromatic propagator at the gate time.
    SmGate(BichromaticArgs),
    /// Compare the closed form with direct Fock-space integration.
    FockCheck(FockArgs),
}

#[derive(Debug, Args)]
struct CouplingsArgs {
    /// JSON trap description; flags below are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    ions: usize,
    /// Relabelling, new index i = old index perm[i] (comma separated).
    /// Defaults to middle-ion-first for three ions.
    #[arg(long)]
    relabel: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BichromaticArgs {
    /// JSON parameter file; flags below are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0.25)]
    g: f64,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long, default_value_t = 3)]
    ions: usize,
    /// `x` or `z`.
    #[arg(long, default_value = "x")]
    basis: String,
    #[arg(long, default_value_t = 20)]
    cutoff: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FockArgs {
    #[command(flatten)]
    params: BichromaticArgs,
    /// Initial motional Fock state.
    #[arg(long, default_value_t = 0)]
    fock: usize,
    /// Fixed integration step count (default 1000 per period).
    #[arg(long)]
    steps: Option<usize>,
    /// Largest accepted deviation from the closed form.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[arg(long)]
    catalog: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(a) => commands::verify(a.source.catalog, a.source.circuit, a.target, a.tol),
        Command::Synthesize(a) => commands::synthesize(a),
        Command::Physics(PhysicsCommand::Couplings(a)) => commands::couplings(a),
        Command::Physics(PhysicsCommand::SmGate(a)) => commands::sm_gate(a),
        Command::Physics(PhysicsCommand::FockCheck(a)) => commands::fock_check(a),
        Command::Export(a) => commands::export(&a.catalog, a.out),
        Command::Catalog => commands::catalog(),
    };
    finish(outcome, cli.json)
}

fn finish(outcome: Result<Outcome, commands::Failure>, json: bool) -> ExitCode {
    match outcome {
        Ok(o) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&o.json).expect("serializable report"));
            } else {
                print!("{}", o.text);
            }
            ExitCode::from(o.exit_code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.exit_code)
        }
    }
}
