//! `hashgrover` command-line driver.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hashgrover::circuit::{count_resources, parse_circuit, serialize_circuit, Circuit, ResourceCount};
use hashgrover::estimator::{
    gate_formulas, measured_step, published_discrepancies, published_rows, published_totals, qubit_width, reconcile,
    reconciliation_csv, Estimate, ScalingParams, DEFAULT_TOLERANCE,
};
use hashgrover::experiments::{run_experiment, Experiment, ExperimentOptions};
use hashgrover::grover::{self, build_grover_circuit, GroverRunConfig, RunOutcome};
use hashgrover::hashes::{
    digest_table, enumerate_preimages, BlakeParams, HashInstance, HashKind, HashSpec, SpongeParams, ToyHash,
};
use hashgrover::oracles::{
    build_blake_compression, build_diffusion, build_oracle, build_sponge_permutation, check_oracle_reversibly,
    OracleSpec, RotationMode,
};
use hashgrover::sim::NoiseScope;
use hashgrover::Error;

/// Environment variable naming the default output directory of experiments.
const OUT_ENV: &str = "HASHGROVER_OUT";

const EXIT_HELP: &str = "\
Exit codes:
  0  success
  2  usage error (unknown subcommand, malformed flag)
  3  invalid parameter value or combination
  4  refused as infeasible (statevector too large)
  5  digest has no preimages
  6  I/O or serialization failure
  7  malformed circuit file
  8  reversible check found a mismatch
  1  any other failure";

#[derive(Parser, Debug)]
#[command(name = "hashgrover", version, about = "Grover preimage search on toy ARX hashes", after_help = EXIT_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the 8-bit digest of one message.
    Hash {
        #[command(flatten)]
        hash: HashArgs,
        /// Message (decimal or 0x-prefixed hex).
        #[arg(long, value_parser = parse_u64)]
        message: u64,
    },
    /// Preimage sets by brute force: one digest, the full table, or a histogram.
    Preimages {
        #[command(flatten)]
        hash: HashArgs,
        /// Only this digest.
        #[arg(long, value_parser = parse_u8)]
        digest: Option<u8>,
        /// Count digests per preimage count instead of listing preimages.
        #[arg(long, conflicts_with = "digest")]
        histogram: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build a circuit and write it in the text format, or its resource counts.
    BuildCircuit {
        #[command(flatten)]
        hash: HashArgs,
        #[arg(long, value_enum, default_value_t = Part::Step)]
        part: Part,
        /// Target digest of the oracle.
        #[arg(long, value_parser = parse_u8, default_value = "0x5A")]
        digest: u8,
        /// Grover steps for `--part grover`.
        #[arg(long, default_value_t = 1)]
        steps: u32,
        /// One shared adder ancilla instead of one per concurrent quarter round.
        #[arg(long)]
        serial_adders: bool,
        /// Decompose multi-controlled gates and lower negative controls.
        #[arg(long)]
        elementary: bool,
        /// Print resource counts (CSV) instead of the circuit.
        #[arg(long)]
        resources: bool,
        /// Read a circuit in the text format instead of building one.
        #[arg(long)]
        from: Option<PathBuf>,
        /// Output file; stdout when absent.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Resource estimates: one formula row, or comparisons against built circuits.
    Estimate {
        #[arg(long, value_enum, default_value_t = Kind::Sponge)]
        kind: Kind,
        /// State width in bits; with --s and --rho selects a single formula row.
        #[arg(long)]
        n: Option<u64>,
        /// Number of state words.
        #[arg(long)]
        s: Option<u64>,
        /// Compression rounds (blake only).
        #[arg(long)]
        rho: Option<u64>,
        /// One shared adder ancilla when computing the qubit count.
        #[arg(long)]
        serial_adders: bool,
        /// Emit rows of every source for toy and full size.
        #[arg(long, conflicts_with_all = ["n", "reconcile", "discrepancies"])]
        table: bool,
        /// Emit the per-category reconciliation of measured toy steps against the formulas.
        #[arg(long, conflicts_with_all = ["n", "discrepancies"])]
        reconcile: bool,
        /// Emit published cells that disagree with their own formulas.
        #[arg(long, conflicts_with = "n")]
        discrepancies: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulate a Grover search on the sponge hash.
    Grover {
        #[command(flatten)]
        hash: HashArgs,
        #[arg(long, value_parser = parse_u8, default_value = "0x05")]
        digest: u8,
        #[arg(long, value_enum, default_value_t = Mode::Known)]
        mode: Mode,
        /// Grover steps (known and early-stop modes); optimal when absent.
        #[arg(long)]
        steps: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check the oracle on every message with the reversible simulator instead.
        #[arg(long)]
        reversible_check: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Seeded experiment procedures.
    Experiments {
        #[command(subcommand)]
        action: ExperimentAction,
    },
}

#[derive(Subcommand, Debug)]
enum ExperimentAction {
    /// List experiment names.
    List,
    /// Run one experiment and write its CSV files and JSON manifest.
    Run(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// probability-evolution, early-stop, unknown-m, entropy or noise-sweep.
    #[arg(value_parser = parse_experiment)]
    name: Experiment,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory [default: $HASHGROVER_OUT, else ./results]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trials per cell (early-stop: 10000, unknown-m: 1000).
    #[arg(long)]
    trials: Option<u64>,
    /// Trajectories per noise point [default: 250].
    #[arg(long)]
    trajectories: Option<u64>,
    /// Pauli probabilities per gate [default: 0,5e-6,1e-5,2e-5,3e-5,1e-4].
    #[arg(long, value_delimiter = ',')]
    probabilities: Option<Vec<f64>>,
    /// Qubits exposed to noise after each gate [default: all-qubits].
    #[arg(long, value_enum)]
    scope: Option<Scope>,
    /// Steps simulated (probability-evolution: 12, entropy: optimal).
    #[arg(long)]
    max_steps: Option<u32>,
    /// Steps covered by the gate-by-gate entropy scan [default: 1].
    #[arg(long)]
    scan_steps: Option<u32>,
}

#[derive(Args, Debug, Clone)]
struct HashArgs {
    #[arg(long, value_enum, default_value_t = Kind::Sponge)]
    kind: Kind,
    /// Sponge initial state.
    #[arg(long, value_parser = parse_u16, default_value = "0")]
    iv: u16,
    /// Sponge double rounds.
    #[arg(long, default_value_t = SpongeParams::DEFAULT_ROUNDS)]
    rounds: u32,
    /// Blake compression rounds.
    #[arg(long, default_value_t = BlakeParams::DEFAULT_RHO)]
    rho: u32,
    /// Blake block counter.
    #[arg(long, default_value_t = 0)]
    counter: u8,
    /// Blake: the block is not the final one.
    #[arg(long)]
    not_last: bool,
}

impl HashArgs {
    fn spec(&self) -> HashSpec {
        match self.kind {
            Kind::Sponge => HashSpec::Sponge(SpongeParams { iv: self.iv, rounds: self.rounds }),
            Kind::Blake => HashSpec::Blake(BlakeParams { t: self.counter, last: !self.not_last, rho: self.rho }),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Sponge,
    Blake,
}

impl From<Kind> for HashKind {
    fn from(k: Kind) -> HashKind {
        match k {
            Kind::Sponge => HashKind::Sponge,
            Kind::Blake => HashKind::Blake,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    /// Hash rounds only (permutation or compression).
    Hash,
    Oracle,
    Diffusion,
    /// Oracle followed by diffusion.
    Step,
    /// Initialization followed by `--steps` steps.
    Grover,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Fixed number of steps, one measurement.
    Known,
    /// Randomized step schedule for an unknown number of preimages.
    Unknown,
    /// Repeat a run of `--steps` steps until a preimage is measured.
    EarlyStop,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Scope {
    TouchedQubits,
    AllQubits,
}

impl From<Scope> for NoiseScope {
    fn from(s: Scope) -> NoiseScope {
        match s {
            Scope::TouchedQubits => NoiseScope::TouchedQubits,
            Scope::AllQubits => NoiseScope::AllQubits,
        }
    }
}

fn parse_u64(s: &str) -> Result<u64, String> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    r.map_err(|e| format!("`{s}`: {e}"))
}

fn parse_u8(s: &str) -> Result<u8, String> {
    u8::try_from(parse_u64(s)?).map_err(|_| format!("`{s}` does not fit in 8 bits"))
}

fn parse_u16(s: &str) -> Result<u16, String> {
    u16::try_from(parse_u64(s)?).map_err(|_| format!("`{s}` does not fit in 16 bits"))
}

fn parse_experiment(s: &str) -> Result<Experiment, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Infeasible(_) | Error::MessageSpaceTooLarge { .. } => 4,
            Error::NoPreimages { .. } => 5,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 6,
            Error::Parse { .. } => 7,
            Error::InvalidParams(_)
            | Error::InvalidProbability(_)
            | Error::InvalidPartition(_)
            | Error::WidthMismatch { .. }
            | Error::QubitOutOfRange { .. } => 3,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: 3, message: message.into() }
}

type CliResult<T = ()> = Result<T, Failure>;

fn write_text(output: Option<&Path>, text: &str) -> CliResult {
    match output {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, text)?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn emit<T: Serialize>(rows: &[T], out: &OutputArgs) -> CliResult {
    let text = match out.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(Error::from)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("csv is utf-8")
        }
        Format::Json => serde_json::to_string_pretty(rows).map_err(Error::from)? + "\n",
    };
    write_text(out.output.as_deref(), &text)
}

#[derive(Serialize)]
struct PreimageRow {
    digest: u8,
    count: usize,
    /// Space-separated messages.
    preimages: String,
}

#[derive(Serialize)]
struct HistogramRow {
    preimage_count: usize,
    digests: usize,
}

#[derive(Serialize)]
struct EstimateRow {
    kind: HashKind,
    n: u64,
    s: u64,
    rho: u64,
    source: String,
    toffoli: u64,
    cnot: u64,
    single: u64,
    total: u64,
    depth: u64,
    qubits: u64,
}

impl EstimateRow {
    fn new(e: &Estimate, total: u64) -> Self {
        EstimateRow {
            kind: e.kind,
            n: e.params.n,
            s: e.params.s,
            rho: e.params.rho,
            source: e.source.to_string(),
            toffoli: e.counts.toffoli,
            cnot: e.counts.cnot,
            single: e.counts.single,
            total,
            depth: e.counts.depth,
            qubits: e.qubits,
        }
    }
}

#[derive(Serialize)]
struct GroverRow {
    mode: &'static str,
    kind: HashKind,
    iv: u16,
    digest: u8,
    m: usize,
    steps: u32,
    seed: u64,
    measured_message: u64,
    is_preimage: bool,
    oracle_calls: u64,
    samples_used: u64,
    exhausted: bool,
}

#[derive(Serialize)]
struct CheckRow {
    kind: HashKind,
    digest: u8,
    messages: u64,
    flagged: usize,
    expected: usize,
    dirty: usize,
    passed: bool,
}

fn cmd_preimages(hash: &HashArgs, digest: Option<u8>, histogram: bool, out: &OutputArgs) -> CliResult {
    let spec = hash.spec();
    let join = |p: &[u64]| p.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    if let Some(d) = digest {
        let inst = enumerate_preimages(d, spec)?;
        return emit(&[PreimageRow { digest: d, count: inst.m(), preimages: join(&inst.preimages) }], out);
    }
    let table = digest_table(&spec)?;
    if histogram {
        let mut counts = std::collections::BTreeMap::<usize, usize>::new();
        for p in &table {
            *counts.entry(p.len()).or_default() += 1;
        }
        let rows: Vec<_> = counts.into_iter().map(|(preimage_count, digests)| HistogramRow { preimage_count, digests }).collect();
        return emit(&rows, out);
    }
    let rows: Vec<_> = table
        .iter()
        .enumerate()
        .map(|(d, p)| PreimageRow { digest: d as u8, count: p.len(), preimages: join(p) })
        .collect();
    emit(&rows, out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_build_circuit(
    hash: &HashArgs,
    part: Part,
    digest: u8,
    steps: u32,
    serial_adders: bool,
    elementary: bool,
    resources: bool,
    from: Option<&Path>,
    output: Option<&Path>,
) -> CliResult {
    if let Some(path) = from {
        let circuit = parse_circuit(&fs::read_to_string(path)?)?;
        return finish_circuit(circuit, elementary, resources, output);
    }
    let spec = OracleSpec::new(hash.spec(), digest).with_adder_ancillas(if serial_adders { 1 } else { 2 })?;
    let layout = spec.layout();
    let circuit: Circuit = match part {
        Part::Hash => match spec.hash {
            HashSpec::Sponge(p) => build_sponge_permutation(&layout, p.rounds, spec.adder_ancillas, RotationMode::Relabel)?.0,
            HashSpec::Blake(p) => build_blake_compression(&layout, p.rho, spec.adder_ancillas, RotationMode::Relabel)?.0,
        },
        Part::Oracle => build_oracle(&spec, &layout)?,
        Part::Diffusion => build_diffusion(layout.width(), layout.message(), layout.work_qubit())?,
        Part::Step => hashgrover::oracles::build_grover_step(&spec, &layout)?,
        Part::Grover => {
            let inst = HashInstance { hash: spec.hash, digest, preimages: Vec::new() };
            build_grover_circuit(&inst, steps)?
        }
    };
    finish_circuit(circuit, elementary, resources, output)
}

fn finish_circuit(mut circuit: Circuit, elementary: bool, resources: bool, output: Option<&Path>) -> CliResult {
    if elementary || resources {
        circuit = circuit.instantiate()?;
    }
    if resources {
        let r: ResourceCount = count_resources(&circuit)?;
        #[derive(Serialize)]
        struct Row {
            toffoli: u64,
            cnot: u64,
            single: u64,
            total: u64,
            depth: u64,
            width: u64,
        }
        let row = Row { toffoli: r.toffoli, cnot: r.cnot, single: r.single, total: r.total(), depth: r.depth, width: r.width };
        return emit(&[row], &OutputArgs { format: Format::Csv, output: output.map(Path::to_path_buf) });
    }
    write_text(output, &serialize_circuit(&circuit))
}

#[allow(clippy::too_many_arguments)]
fn cmd_estimate(
    kind: HashKind,
    n: Option<u64>,
    s: Option<u64>,
    rho: Option<u64>,
    serial_adders: bool,
    table: bool,
    reconcile_flag: bool,
    discrepancies: bool,
    out: &OutputArgs,
) -> CliResult {
    let (toy, real) = match kind {
        HashKind::Sponge => (ScalingParams::TOY_SPONGE, ScalingParams::REAL_SPONGE),
        HashKind::Blake => (ScalingParams::TOY_BLAKE, ScalingParams::REAL_BLAKE),
    };
    let toy_digest = 0x5A;
    let measured = |digest| {
        let hash = match kind {
            HashKind::Sponge => HashSpec::Sponge(SpongeParams::default()),
            HashKind::Blake => HashSpec::Blake(BlakeParams::default()),
        };
        measured_step(&OracleSpec::new(hash, digest).with_adder_ancillas(if serial_adders { 1 } else { 2 })?)
    };
    let formula = |p: ScalingParams| -> CliResult<Estimate> {
        let mut e = gate_formulas(kind, p)?;
        e.qubits = qubit_width(p, kind, !serial_adders)?;
        Ok(e)
    };
    if reconcile_flag {
        let report = reconcile(&measured(toy_digest)?, &formula(toy)?, DEFAULT_TOLERANCE)?;
        return write_text(out.output.as_deref(), &reconciliation_csv(&[report])?);
    }
    if discrepancies {
        #[derive(Serialize)]
        struct Row {
            kind: HashKind,
            n: u64,
            s: u64,
            rho: u64,
            column: String,
            published: u64,
            formula: u64,
            note: String,
        }
        let rows: Vec<_> = published_discrepancies()?
            .into_iter()
            .filter(|d| d.kind == kind)
            .map(|d| Row {
                kind: d.kind,
                n: d.params.n,
                s: d.params.s,
                rho: d.params.rho,
                column: d.column,
                published: d.published,
                formula: d.formula,
                note: d.note,
            })
            .collect();
        return emit(&rows, out);
    }
    if table {
        let mut rows = Vec::new();
        for p in [toy, real] {
            let f = formula(p)?;
            rows.push(EstimateRow::new(&f, f.counts.total()));
        }
        let m = measured(toy_digest)?;
        rows.push(EstimateRow::new(&m, m.counts.total()));
        for (e, total) in published_rows().iter().zip(published_totals()) {
            if e.kind == kind {
                rows.push(EstimateRow::new(e, total));
            }
        }
        return emit(&rows, out);
    }
    let p = match (n, s) {
        (None, None) => toy,
        (Some(n), Some(s)) => {
            let rho = match kind {
                HashKind::Sponge => rho.unwrap_or(0),
                HashKind::Blake => rho.unwrap_or(BlakeParams::DEFAULT_RHO as u64),
            };
            ScalingParams::new(n, s, rho)?
        }
        _ => return Err(invalid("--n and --s must be given together")),
    };
    let f = formula(p)?;
    emit(&[EstimateRow::new(&f, f.counts.total())], out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_grover(
    hash: &HashArgs,
    digest: u8,
    mode: Mode,
    steps: Option<u32>,
    seed: u64,
    reversible_check: bool,
    out: &OutputArgs,
) -> CliResult {
    let spec = hash.spec();
    if reversible_check {
        let check = check_oracle_reversibly(&OracleSpec::new(spec, digest))?;
        let row = CheckRow {
            kind: check.kind,
            digest,
            messages: check.messages,
            flagged: check.flagged.len(),
            expected: check.expected.len(),
            dirty: check.dirty.len(),
            passed: check.passed(),
        };
        emit(&[row], out)?;
        if !check.passed() {
            return Err(Failure { code: 8, message: "oracle disagrees with the classical hash".into() });
        }
        return Ok(());
    }
    if spec.kind() == HashKind::Blake {
        let width = OracleSpec::new(spec, digest).layout().width();
        return Err(Error::Infeasible(format!(
            "a {width}-qubit statevector does not fit in memory; use --reversible-check to verify the blake oracle"
        ))
        .into());
    }
    let inst = enumerate_preimages(digest, spec)?;
    if inst.m() == 0 {
        return Err(Error::NoPreimages { digest }.into());
    }
    let mut config = GroverRunConfig::new(inst.clone()).with_seed(seed);
    if let Some(k) = steps {
        config = config.with_steps(k);
    }
    let k = config.steps()?;
    let (name, outcome): (&str, RunOutcome) = match mode {
        Mode::Known => ("known", grover::run_known_m(&config)?),
        Mode::Unknown => ("unknown", grover::run_unknown_m(&config)?),
        Mode::EarlyStop => ("early-stop", grover::run_early_stop(&config, k)?),
    };
    let row = GroverRow {
        mode: name,
        kind: HashKind::Sponge,
        iv: hash.iv,
        digest,
        m: inst.m(),
        steps: if mode == Mode::Unknown { 0 } else { k },
        seed,
        measured_message: outcome.measured_message,
        is_preimage: outcome.is_preimage,
        oracle_calls: outcome.oracle_calls,
        samples_used: outcome.samples_used,
        exhausted: outcome.exhausted,
    };
    emit(&[row], out)
}

fn cmd_experiment(args: &RunArgs) -> CliResult {
    let out = args
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"));
    let options = ExperimentOptions {
        trials: args.trials,
        trajectories: args.trajectories,
        probabilities: args.probabilities.clone(),
        scope: args.scope.map(Into::into),
        max_steps: args.max_steps,
        scan_steps: args.scan_steps,
    };
    let result = run_experiment(args.name, args.seed, &options)?;
    for path in result.write(&out)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Hash { hash, message } => {
            let spec = hash.spec();
            let bits = spec.message_bits();
            if message >> bits != 0 {
                return Err(invalid(format!("message {message:#x} does not fit in {bits} bits")));
            }
            write_text(None, &format!("{:#04x}\n", spec.digest(message)))
        }
        Command::Preimages { hash, digest, histogram, out } => cmd_preimages(&hash, digest, histogram, &out),
        Command::BuildCircuit { hash, part, digest, steps, serial_adders, elementary, resources, from, output } => {
            let (from, output) = (from.as_deref(), output.as_deref());
            cmd_build_circuit(&hash, part, digest, steps, serial_adders, elementary, resources, from, output)
        }
        Command::Estimate { kind, n, s, rho, serial_adders, table, reconcile, discrepancies, out } => {
            cmd_estimate(kind.into(), n, s, rho, serial_adders, table, reconcile, discrepancies, &out)
        }
        Command::Grover { hash, digest, mode, steps, seed, reversible_check, out } => {
            cmd_grover(&hash, digest, mode, steps, seed, reversible_check, &out)
        }
        Command::Experiments { action } => match action {
            ExperimentAction::List => {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
                write_text(None, &(names.join("\n") + "\n"))
            }
            ExperimentAction::Run(args) => cmd_experiment(&args),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
