mod config;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcorr_core::correlations::{discord, is_classical_quantum_with, is_classically_correlated_with, one_way_deficit, ClassicalityVerdict};
use qcorr_core::entropy::{conditional_entropy_subtractive, mutual_information, von_neumann_entropy};
use qcorr_core::protocols::{run_bb84, run_decoding, Basis};
use qcorr_core::qstate::{negativity, StateFile};
use qcorr_core::{states, DensityOperator, Error, OptimizationReport, Result};
use serde::Serialize;

use config::{EncodingSpec, Eve, FileConfig, Format};
use render::Table;

#[derive(Parser)]
#[command(name = "qcorr", version, about = "Quantum correlations toolkit: entropies, discord, deficit, classicality, BB84, decoding game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Flat JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Polar grid points for qubit measurements (azimuthal gets twice as many).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Optimizer refinement tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Disturbance threshold for classicality verdicts.
    #[arg(long, global = true)]
    class_tol: Option<f64>,
    /// Subsystem measured by discord and deficit (0 or 1).
    #[arg(long, global = true)]
    measured_side: Option<usize>,
    /// Subsystems forming the first party when a state has more than two.
    #[arg(long, global = true, value_delimiter = ',')]
    cut: Option<Vec<usize>>,
}

#[derive(Args)]
struct StateInput {
    /// Registered state name.
    name: Option<String>,
    /// State file in the JSON interchange format.
    #[arg(long, conflicts_with = "name")]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a named state or re-emit a state file.
    State(StateInput),
    /// Entropies, discord, deficit, classicality and negativity of a state.
    Analyze(StateInput),
    /// Discord with the full optimizer report.
    Discord(StateInput),
    /// One-way deficit with the full optimizer report.
    Deficit(StateInput),
    /// Simulate BB84 with optional intercept-resend.
    Bb84 {
        #[arg(long)]
        rounds: Option<usize>,
        /// Intercept-resend basis; bare flag means z.
        #[arg(long, value_enum, num_args = 0..=1, default_missing_value = "z")]
        eavesdrop: Option<Eve>,
    },
    /// Encode/decode game; the positional argument is a flat JSON config.
    Decode {
        config_file: Option<PathBuf>,
        /// Registered initial state (default discordant-mixture).
        #[arg(long)]
        state: Option<String>,
        /// Initial state file.
        #[arg(long, conflicts_with = "state")]
        file: Option<PathBuf>,
        /// Encoding preset (pauli4 or bit-flip).
        #[arg(long)]
        encoding: Option<String>,
    },
}

struct Output {
    json: String,
    table: String,
}

impl Output {
    fn new<T: Serialize>(value: &T, table: String) -> Result<Self> {
        Ok(Self {
            json: serde_json::to_string_pretty(value)? + "\n",
            table,
        })
    }
}

fn load_state(input: &StateInput, cfg: &FileConfig) -> Result<DensityOperator> {
    if let Some(path) = &input.file {
        return DensityOperator::from_json(&std::fs::read_to_string(path)?);
    }
    if let Some(name) = &input.name {
        return Ok(states::named(name)?.state);
    }
    if let Some(path) = &cfg.state_file {
        return DensityOperator::from_json(&std::fs::read_to_string(path)?);
    }
    if let Some(name) = &cfg.state {
        return Ok(states::named(name)?.state);
    }
    Err(Error::Config(format!("no state given; pass a name ({}) or --file", states::REGISTRY.join(", "))))
}

/// Regroups the state into `[cut, rest]` when it has more than two parties or a cut is given.
fn bipartite(rho: DensityOperator, cfg: &FileConfig) -> Result<DensityOperator> {
    let n = rho.num_subsystems();
    if n == 2 && cfg.cut.is_none() {
        return Ok(rho);
    }
    if n < 2 {
        return Err(Error::Unsupported("need at least two subsystems".into()));
    }
    let cut = cfg.cut.clone().unwrap_or_else(|| vec![0]);
    let rest: Vec<usize> = (0..n).filter(|k| !cut.contains(k)).collect();
    rho.regroup(&[&cut, &rest])
}

fn measured_side(cfg: &FileConfig) -> Result<usize> {
    match cfg.measured_side.unwrap_or(0) {
        s @ (0 | 1) => Ok(s),
        s => Err(Error::Config(format!("measured side must be 0 or 1, got {s}"))),
    }
}

fn cmd_state(input: &StateInput, cfg: &FileConfig) -> Result<Output> {
    let rho = load_state(input, cfg)?;
    let mut table = format!("dims {:?}\n", rho.dims());
    table += &render::matrix(rho.matrix());
    Ok(Output {
        json: rho.to_json()? + "\n",
        table,
    })
}

#[derive(Serialize)]
struct AnalyzeReport {
    state: StateFile,
    entropy_a: f64,
    entropy_b: f64,
    entropy_ab: f64,
    conditional_entropy_b_given_a: f64,
    conditional_entropy_a_given_b: f64,
    mutual_information: f64,
    discord_measuring_a: f64,
    discord_measuring_b: f64,
    deficit_measuring_a: f64,
    deficit_measuring_b: f64,
    classically_correlated: ClassicalityVerdict,
    classical_on_a: ClassicalityVerdict,
    classical_on_b: ClassicalityVerdict,
    negativity: f64,
}

fn cmd_analyze(input: &StateInput, cfg: &FileConfig) -> Result<Output> {
    let rho = bipartite(load_state(input, cfg)?, cfg)?;
    let opt = cfg.optimizer()?;
    let tol = cfg.class_tol()?;
    let r = AnalyzeReport {
        state: rho.to_file(),
        entropy_a: von_neumann_entropy(&rho.partial_trace(&[0])?),
        entropy_b: von_neumann_entropy(&rho.partial_trace(&[1])?),
        entropy_ab: von_neumann_entropy(&rho),
        conditional_entropy_b_given_a: conditional_entropy_subtractive(&rho, 0)?,
        conditional_entropy_a_given_b: conditional_entropy_subtractive(&rho, 1)?,
        mutual_information: mutual_information(&rho, &[0])?,
        discord_measuring_a: discord(&rho, 0, &opt)?.value,
        discord_measuring_b: discord(&rho, 1, &opt)?.value,
        deficit_measuring_a: one_way_deficit(&rho, 0, &opt)?.value,
        deficit_measuring_b: one_way_deficit(&rho, 1, &opt)?.value,
        classically_correlated: is_classically_correlated_with(&rho, tol, &opt)?,
        classical_on_a: is_classical_quantum_with(&rho, 0, tol, &opt)?,
        classical_on_b: is_classical_quantum_with(&rho, 1, tol, &opt)?,
        negativity: negativity(&rho, &[0])?,
    };
    let mut t = Table::default();
    t.text("dims", format!("{:?}", rho.dims()))
        .num("S(A)", r.entropy_a)
        .num("S(B)", r.entropy_b)
        .num("S(AB)", r.entropy_ab)
        .num("S(B|A)", r.conditional_entropy_b_given_a)
        .num("S(A|B)", r.conditional_entropy_a_given_b)
        .num("I(A:B)", r.mutual_information)
        .num("discord (measure A)", r.discord_measuring_a)
        .num("discord (measure B)", r.discord_measuring_b)
        .num("deficit (measure A)", r.deficit_measuring_a)
        .num("deficit (measure B)", r.deficit_measuring_b)
        .verdict("classically correlated", &r.classically_correlated)
        .verdict("classical on A", &r.classical_on_a)
        .verdict("classical on B", &r.classical_on_b)
        .num("negativity", r.negativity);
    Output::new(&r, t.render())
}

#[derive(Serialize)]
struct OptimizedQuantity {
    quantity: &'static str,
    measured_side: usize,
    dims: Vec<usize>,
    value: f64,
    report: OptimizationReport,
}

fn cmd_optimized(input: &StateInput, cfg: &FileConfig, quantity: &'static str) -> Result<Output> {
    let rho = bipartite(load_state(input, cfg)?, cfg)?;
    let opt = cfg.optimizer()?;
    let side = measured_side(cfg)?;
    let report = if quantity == "discord" {
        discord(&rho, side, &opt)?
    } else {
        one_way_deficit(&rho, side, &opt)?
    };
    let r = OptimizedQuantity {
        quantity,
        measured_side: side,
        dims: rho.dims().to_vec(),
        value: report.value,
        report,
    };
    let angles: Vec<String> = r.report.argmin.angles.iter().map(|&a| render::sig9(a)).collect();
    let mut t = Table::default();
    t.num(quantity, r.value)
        .text("measured side", side.to_string())
        .text("argmin", format!("[{}]", angles.join(", ")))
        .text("candidates", r.report.grid_size.to_string())
        .text("refinement steps", r.report.refinement_steps.to_string());
    Output::new(&r, t.render())
}

fn cmd_bb84(rounds: Option<usize>, eve: Option<Eve>, cfg: &FileConfig) -> Result<Output> {
    let eavesdropper = eve.or(cfg.eavesdrop).map(|e| match e {
        Eve::Z => Basis::Z,
        Eve::X => Basis::X,
    });
    let run = run_bb84(rounds.or(cfg.rounds).unwrap_or(10_000), cfg.seed.unwrap_or(0), eavesdropper)?;
    let ms = &run.mismatch_stats;
    let mut t = Table::default();
    t.text("rounds", run.rounds.to_string())
        .text("seed", run.seed.to_string())
        .text("rng", run.rng.clone())
        .text("eavesdropper", eavesdropper.map_or("none".into(), |b| format!("{b:?}")))
        .text("sifted length", run.sifted_key_a.len().to_string())
        .text("sifted errors", run.sifted_errors.to_string())
        .num("QBER", run.qber)
        .text("mismatched rounds", ms.rounds.to_string())
        .num("mismatched correlation", ms.correlation)
        .num("correlation sigma", ms.sigma);
    Output::new(&run, t.render())
}

fn cmd_decode(input: &StateInput, encoding: &Option<String>, cfg: &FileConfig) -> Result<Output> {
    let rho = if input.name.is_none() && input.file.is_none() && cfg.state.is_none() && cfg.state_file.is_none() {
        states::discordant_mixture()
    } else {
        load_state(input, cfg)?
    };
    let spec = match encoding {
        Some(name) => EncodingSpec::Preset(name.clone()),
        None => cfg.encoding.clone().unwrap_or_else(|| EncodingSpec::Preset("pauli4".into())),
    };
    let exp = run_decoding(&rho, &spec.resolve()?, &cfg.optimizer()?)?;
    let mut t = Table::default();
    t.text("symbols", exp.x_alphabet.join(", "))
        .num("LOCC information", exp.locc_result)
        .num("global information", exp.global_result)
        .num("advantage", exp.advantage)
        .num("Holevo bound", exp.holevo)
        .num("prior entropy", exp.prior_entropy);
    Output::new(&exp, t.render())
}

fn flag_config(c: &Common) -> FileConfig {
    FileConfig {
        format: c.format,
        seed: c.seed,
        grid: c.grid,
        tol: c.tol,
        class_tol: c.class_tol,
        measured_side: c.measured_side,
        cut: c.cut.clone(),
        ..Default::default()
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    if let Command::Decode { config_file: Some(path), .. } = &cli.command {
        cfg = cfg.overlay(FileConfig::load(path)?);
    }
    let cfg = cfg.overlay(flag_config(&cli.common));
    let output = match &cli.command {
        Command::State(input) => cmd_state(input, &cfg)?,
        Command::Analyze(input) => cmd_analyze(input, &cfg)?,
        Command::Discord(input) => cmd_optimized(input, &cfg, "discord")?,
        Command::Deficit(input) => cmd_optimized(input, &cfg, "deficit")?,
        Command::Bb84 { rounds, eavesdrop } => cmd_bb84(*rounds, *eavesdrop, &cfg)?,
        Command::Decode { state, file, encoding, .. } => {
            let input = StateInput {
                name: state.clone(),
                file: file.clone(),
            };
            cmd_decode(&input, encoding, &cfg)?
        }
    };
    // a state written to a file is always the interchange format
    let json_only = cli.common.out.is_some() && matches!(cli.command, Command::State(_));
    let text = if json_only || cfg.format() == Format::Json {
        output.json
    } else {
        output.table
    };
    match &cli.common.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return fail("usage", e.to_string().trim_end().to_string(), 2),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), e.to_string(), 1),
    }
}
