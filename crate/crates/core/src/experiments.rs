//! Seeded experiment procedures. Each returns an [`ExperimentResult`] holding
//! one or more tables that are written as CSV plus a JSON manifest.
//!
//! Column names of every table are a stable contract; see the README.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::grover::{
    analytic_success_probability, bbht_bound, optimal_steps, GroverSimulator, DEFAULT_LAMBDA, DEFAULT_MAX_ATTEMPTS,
    DEFAULT_MAX_SAMPLES,
};
use crate::hashes::{find_sponge_instance, HashInstance, HashSpec, SpongeParams};
use crate::oracles::{build_grover_step, build_initialization, OracleSpec, DIFFUSION_MARKER, MID_MARKER};
use crate::sim::{
    entropy_of_entries, sample_events, Bipartition, CompiledCircuit, FastState, NoiseScope, StateVector,
};

/// Rounds of the sponge permutation used by every experiment.
pub const ROUNDS: u32 = SpongeParams::DEFAULT_ROUNDS;

/// Reference early-stop cells: (M, steps, success probability, mean samples
/// to first hit, oracle calls).
pub const REFERENCE_EARLY_STOP: [(usize, u32, f64, f64, u32); 19] = [
    (2, 1, 0.069, 14.523, 15),
    (2, 2, 0.183, 5.453, 11),
    (2, 3, 0.337, 2.966, 9),
    (2, 4, 0.511, 1.956, 8),
    (2, 5, 0.684, 1.463, 8),
    (2, 6, 0.834, 1.120, 8),
    (2, 7, 0.942, 1.062, 8),
    (2, 8, 0.996, 1.004, 8),
    (4, 1, 0.135, 7.417, 8),
    (4, 2, 0.344, 2.908, 6),
    (4, 3, 0.591, 1.691, 6),
    (4, 4, 0.816, 1.225, 5),
    (4, 5, 0.964, 1.038, 6),
    (4, 6, 0.997, 1.003, 6),
    (6, 1, 0.198, 5.052, 6),
    (6, 2, 0.483, 2.067, 5),
    (6, 3, 0.774, 1.291, 4),
    (6, 4, 0.965, 1.036, 5),
    (6, 5, 0.986, 1.015, 5),
];

/// Reference mean oracle calls of the unknown-M loop: (M, mean).
pub const REFERENCE_UNKNOWN_M: [(usize, f64); 3] = [(2, 10.0), (4, 6.3), (6, 4.7)];

fn reference_cell(m: usize, steps: u32) -> Option<(f64, f64, u32)> {
    REFERENCE_EARLY_STOP.iter().find(|r| r.0 == m && r.1 == steps).map(|r| (r.2, r.3, r.4))
}

/// Generator for stream `stream` of the master seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One sponge instance per requested preimage count, found by IV scan.
pub fn standard_instances(counts: &[usize]) -> Result<Vec<HashInstance>> {
    counts
        .iter()
        .map(|&m| {
            find_sponge_instance(m, ROUNDS)
                .ok_or_else(|| Error::InvalidParams(format!("no sponge digest with exactly {m} preimages")))
        })
        .collect()
}

fn sponge_iv(instance: &HashInstance) -> u16 {
    match instance.hash {
        HashSpec::Sponge(p) => p.iv,
        HashSpec::Blake(_) => 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Columns come from the row type, so an empty table still has a header.
    pub fn from_rows<T: Serialize + Default>(name: &str, rows: &[T]) -> Result<Table> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(T::default())?;
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        let mut rd = csv::Reader::from_reader(bytes.as_slice());
        let columns = rd.headers()?.iter().map(str::to_string).collect();
        let rows = rd
            .records()
            .skip(1)
            .map(|r| r.map(|r| r.iter().map(str::to_string).collect()))
            .collect::<Result<_, _>>()?;
        Ok(Table { name: name.to_string(), columns, rows })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let obj: serde_json::Map<String, Value> =
                        self.columns.iter().zip(r).map(|(c, v)| (c.clone(), Value::String(v.clone()))).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub name: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: u64,
    pub wall_time_secs: f64,
    /// The first table is the primary one and is written as `<name>.csv`.
    pub tables: Vec<Table>,
}

impl ExperimentResult {
    fn new(name: &str, seed: u64, started: Instant, parameters: BTreeMap<String, Value>, tables: Vec<Table>) -> Self {
        ExperimentResult {
            name: name.to_string(),
            parameters,
            seed,
            wall_time_secs: started.elapsed().as_secs_f64(),
            tables,
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn file_name(&self, table: &Table) -> String {
        if self.tables.first().map(|t| &t.name) == Some(&table.name) {
            format!("{}.csv", self.name)
        } else {
            format!("{}_{}.csv", self.name, table.name)
        }
    }

    /// Writes every table as CSV and `<name>.json` with parameters, seed,
    /// timing, file list and the table contents.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut files = Vec::new();
        for t in &self.tables {
            let name = self.file_name(t);
            let path = dir.join(&name);
            fs::write(&path, t.to_csv()?)?;
            files.push(name);
            written.push(path);
        }
        let tables: serde_json::Map<String, Value> = self.tables.iter().map(|t| (t.name.clone(), t.to_json())).collect();
        let manifest = json!({
            "name": self.name,
            "seed": self.seed,
            "parameters": self.parameters,
            "wall_time_secs": self.wall_time_secs,
            "version": env!("CARGO_PKG_VERSION"),
            "files": files,
            "tables": tables,
        });
        let path = dir.join(format!("{}.json", self.name));
        fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
        written.push(path);
        Ok(written)
    }
}

fn instance_params(instances: &[HashInstance]) -> Value {
    Value::Array(
        instances
            .iter()
            .map(|i| json!({"m": i.m(), "iv": sponge_iv(i), "digest": i.digest, "preimages": i.preimages}))
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Probability evolution

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvolutionRow {
    pub m: usize,
    pub iv: u16,
    pub digest: u8,
    pub step: u32,
    pub message: u64,
    pub probability: f64,
    pub is_preimage: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvolutionStepRow {
    pub m: usize,
    pub iv: u16,
    pub digest: u8,
    pub step: u32,
    pub preimage_probability: f64,
    pub analytic_probability: f64,
    pub is_peak: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityEvolution {
    pub messages: Vec<EvolutionRow>,
    pub steps: Vec<EvolutionStepRow>,
    pub peak_step: u32,
}

/// Exact per-message probabilities after `0..=max_steps` Grover steps.
pub fn probability_evolution(instance: &HashInstance, max_steps: u32) -> Result<ProbabilityEvolution> {
    let mut sim = GroverSimulator::new(instance)?;
    let (iv, digest, m) = (sponge_iv(instance), instance.digest, instance.m());
    let mut messages = Vec::new();
    let mut steps = Vec::new();
    for k in 0..=max_steps {
        let d = sim.distribution(k)?.to_vec();
        for (msg, &p) in d.iter().enumerate() {
            messages.push(EvolutionRow {
                m,
                iv,
                digest,
                step: k,
                message: msg as u64,
                probability: p,
                is_preimage: instance.is_preimage(msg as u64),
            });
        }
        steps.push(EvolutionStepRow {
            m,
            iv,
            digest,
            step: k,
            preimage_probability: instance.preimages.iter().map(|&x| d[x as usize]).sum(),
            analytic_probability: analytic_success_probability(instance.n(), m as u64, k),
            is_peak: false,
        });
    }
    let peak = steps
        .iter()
        .max_by(|a, b| a.preimage_probability.total_cmp(&b.preimage_probability))
        .map(|r| r.step)
        .unwrap_or(0);
    steps[peak as usize].is_peak = true;
    Ok(ProbabilityEvolution { messages, steps, peak_step: peak })
}

fn evolution_result(instances: &[HashInstance], max_steps: u32, seed: u64) -> Result<ExperimentResult> {
    let started = Instant::now();
    let mut messages = Vec::new();
    let mut steps = Vec::new();
    for inst in instances {
        let e = probability_evolution(inst, max_steps)?;
        messages.extend(e.messages);
        steps.extend(e.steps);
    }
    let params = BTreeMap::from([
        ("instances".to_string(), instance_params(instances)),
        ("max_steps".to_string(), json!(max_steps)),
    ]);
    Ok(ExperimentResult::new(
        "probability-evolution",
        seed,
        started,
        params,
        vec![Table::from_rows("messages", &messages)?, Table::from_rows("steps", &steps)?],
    ))
}

// ---------------------------------------------------------------------------
// Early stop

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EarlyStopRow {
    pub m: usize,
    pub iv: u16,
    pub digest: u8,
    pub steps: u32,
    pub success_probability: f64,
    pub analytic_probability: f64,
    /// `1/p`.
    pub expected_samples: f64,
    pub mean_samples: f64,
    /// Standard error of `mean_samples`, `√((1−p)/p²/trials)`.
    pub samples_sigma: f64,
    pub trials: u64,
    pub expected_oracle_calls: f64,
    pub mean_oracle_calls: f64,
    pub reference_probability: Option<f64>,
    pub reference_first: Option<f64>,
    pub reference_calls: Option<u32>,
}

pub const DEFAULT_EARLY_STOP_TRIALS: u64 = 10_000;

/// Per `(M, steps)` cell with `steps` in `1..=optimal_steps`: exact success
/// probability and the empirical mean number of runs until a preimage is
/// measured.
pub fn early_stop_table(instances: &[HashInstance], trials: u64, seed: u64) -> Result<Vec<EarlyStopRow>> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be positive".into()));
    }
    let mut rows = Vec::new();
    for (ii, inst) in instances.iter().enumerate() {
        let mut sim = GroverSimulator::new(inst)?;
        let (m, n) = (inst.m(), inst.n());
        let opt = optimal_steps(n, m as u64)?;
        for steps in 1..=opt {
            let p = sim.success_probability(steps)?;
            let mut rng = stream_rng(seed, ((ii as u64) << 32) | steps as u64);
            let mut total_samples = 0u64;
            for _ in 0..trials {
                let out = sim.run_early_stop(steps, DEFAULT_MAX_SAMPLES, &mut rng)?;
                total_samples += out.samples_used;
            }
            let mean = total_samples as f64 / trials as f64;
            let reference = reference_cell(m, steps);
            rows.push(EarlyStopRow {
                m,
                iv: sponge_iv(inst),
                digest: inst.digest,
                steps,
                success_probability: p,
                analytic_probability: analytic_success_probability(n, m as u64, steps),
                expected_samples: 1.0 / p,
                mean_samples: mean,
                samples_sigma: ((1.0 - p) / (p * p) / trials as f64).sqrt(),
                trials,
                expected_oracle_calls: steps as f64 / p,
                mean_oracle_calls: steps as f64 * mean,
                reference_probability: reference.map(|r| r.0),
                reference_first: reference.map(|r| r.1),
                reference_calls: reference.map(|r| r.2),
            });
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Unknown M

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UnknownMRow {
    pub m: usize,
    pub iv: u16,
    pub digest: u8,
    pub optimal_steps: u32,
    pub trials: u64,
    pub mean_calls: f64,
    pub calls_stderr: f64,
    /// Exact expectation of the loop with the same cap.
    pub expected_calls: f64,
    pub bound: f64,
    pub exhausted: u64,
    pub reference_mean_calls: Option<f64>,
}

pub const DEFAULT_UNKNOWN_M_TRIALS: u64 = 1000;

/// Exact expected oracle calls of the unknown-M loop.
pub fn expected_unknown_m_calls(n: u64, m: u64, lambda: f64, max_attempts: u32) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let (mut bound, mut reach, mut calls) = (1.0f64, 1.0f64, 0.0f64);
    for _ in 0..max_attempts {
        let k = bound.ceil() as u32;
        let hit = (0..k).map(|j| analytic_success_probability(n, m, j)).sum::<f64>() / k as f64;
        calls += reach * (k - 1) as f64 / 2.0;
        reach *= 1.0 - hit;
        bound = (lambda * bound).min(sqrt_n);
    }
    calls
}

pub fn unknown_m_statistics(instances: &[HashInstance], trials: u64, seed: u64) -> Result<Vec<UnknownMRow>> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be positive".into()));
    }
    instances
        .iter()
        .enumerate()
        .map(|(ii, inst)| {
            let mut sim = GroverSimulator::new(inst)?;
            let mut rng = stream_rng(seed, 1 << 40 | ii as u64);
            let mut calls = Vec::with_capacity(trials as usize);
            let mut exhausted = 0;
            for _ in 0..trials {
                let out = sim.run_unknown_m(DEFAULT_LAMBDA, DEFAULT_MAX_ATTEMPTS, &mut rng)?;
                exhausted += out.exhausted as u64;
                calls.push(out.oracle_calls as f64);
            }
            let t = trials as f64;
            let mean = calls.iter().sum::<f64>() / t;
            let var = calls.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (t - 1.0).max(1.0);
            let (n, m) = (inst.n(), inst.m() as u64);
            Ok(UnknownMRow {
                m: inst.m(),
                iv: sponge_iv(inst),
                digest: inst.digest,
                optimal_steps: optimal_steps(n, m)?,
                trials,
                mean_calls: mean,
                calls_stderr: (var / t).sqrt(),
                expected_calls: expected_unknown_m_calls(n, m, DEFAULT_LAMBDA, DEFAULT_MAX_ATTEMPTS),
                bound: bbht_bound(n, m),
                exhausted,
                reference_mean_calls: REFERENCE_UNKNOWN_M.iter().find(|r| r.0 == inst.m()).map(|r| r.1),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Entropy

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EntropyStepRow {
    pub m: usize,
    pub iv: u16,
    pub digest: u8,
    pub step: u32,
    /// Half of the permutation state against the rest, right after the phase
    /// flip.
    pub mid_entropy: f64,
    /// Half of the message register against the rest, after the step.
    pub post_entropy: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EntropyScanRow {
    pub m: usize,
    pub iv: u16,
    pub digest: u8,
    pub step: u32,
    /// Gates applied within the step, counting from 1.
    pub gate: usize,
    pub phase: String,
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyProfile {
    pub steps: Vec<EntropyStepRow>,
    pub scan: Vec<EntropyScanRow>,
}

impl EntropyProfile {
    pub fn scan_max(&self) -> Option<&EntropyScanRow> {
        self.scan.iter().max_by(|a, b| a.entropy.total_cmp(&b.entropy))
    }
}

fn entropy_of(state: &mut FastState, p: &Bipartition) -> f64 {
    entropy_of_entries(state.nonzero(), p)
}

/// Per-step mid and post entropies for `steps` steps, and a gate-by-gate scan
/// over the elementary gates of the first `scan_steps` steps.
pub fn entropy_profile(instance: &HashInstance, steps: u32, scan_steps: u32) -> Result<EntropyProfile> {
    let spec = OracleSpec::for_instance(instance);
    let layout = spec.layout();
    let width = layout.width();
    let mid_part = Bipartition::new(width, layout.message().iter().copied())?;
    let post_part = Bipartition::new(width, layout.message()[..layout.message().len() / 2].iter().copied())?;
    let step = build_grover_step(&spec, &layout)?;
    let native = CompiledCircuit::compile(&step)?;
    let mid = native.marker(MID_MARKER).expect("step carries the mid marker");
    let elementary = CompiledCircuit::compile(&step.instantiate()?)?;
    let diffusion_at = elementary.marker(DIFFUSION_MARKER).expect("step carries the diffusion marker");
    let cut = mid_part.subsystem_a().iter().fold(0u64, |acc, &q| acc | 1 << q);

    let mut initial = FastState::from_state(&StateVector::new(width)?);
    initial.run(&CompiledCircuit::compile(&build_initialization(&layout))?)?;
    let (iv, digest, m) = (sponge_iv(instance), instance.digest, instance.m());

    let mut rows = Vec::new();
    let mut state = initial.clone();
    for k in 1..=steps {
        state.run_range(&native, 0..mid, &[])?;
        let mid_entropy = entropy_of(&mut state, &mid_part);
        state.run_range(&native, mid..native.len(), &[])?;
        rows.push(EntropyStepRow { m, iv, digest, step: k, mid_entropy, post_entropy: entropy_of(&mut state, &post_part) });
    }

    let mut scan = Vec::new();
    let mut state = initial;
    for k in 1..=scan_steps {
        let mut current = entropy_of(&mut state, &mid_part);
        for (i, op) in elementary.ops().iter().enumerate() {
            state.run_range(&elementary, i..i + 1, &[])?;
            // Gates entirely on one side leave the entropy unchanged.
            let support = op.support();
            if support & cut != 0 && support & !cut != 0 {
                current = entropy_of(&mut state, &mid_part);
            }
            scan.push(EntropyScanRow {
                m,
                iv,
                digest,
                step: k,
                gate: i + 1,
                phase: if i < diffusion_at { "oracle" } else { "diffusion" }.to_string(),
                entropy: current,
            });
        }
    }
    Ok(EntropyProfile { steps: rows, scan })
}

// ---------------------------------------------------------------------------
// Noise

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseRow {
    pub m: usize,
    pub iv: u16,
    pub digest: u8,
    pub pauli_probability: f64,
    pub scope: NoiseScope,
    /// `full`: all optimal steps, one run. `half`: half the steps, two runs.
    pub strategy: String,
    pub steps: u32,
    pub runs: u32,
    pub trajectories: u64,
    /// Mean over trajectories of the probability that at least one run
    /// measures a preimage.
    pub success: f64,
    pub success_stderr: f64,
    /// `M/N`.
    pub baseline: f64,
    /// `√(b(1−b)/trajectories)` with `b` the baseline.
    pub baseline_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSweepConfig {
    pub probabilities: Vec<f64>,
    pub trajectories: u64,
    pub scope: NoiseScope,
    pub seed: u64,
}

pub const DEFAULT_TRAJECTORIES: u64 = 250;
pub const DEFAULT_NOISE_PROBABILITIES: [f64; 6] = [0.0, 5e-6, 1e-5, 2e-5, 3e-5, 1e-4];

impl Default for NoiseSweepConfig {
    fn default() -> Self {
        NoiseSweepConfig {
            probabilities: DEFAULT_NOISE_PROBABILITIES.to_vec(),
            trajectories: DEFAULT_TRAJECTORIES,
            scope: NoiseScope::AllQubits,
            seed: 0,
        }
    }
}

struct NoisyProgram {
    program: CompiledCircuit,
    steps: u32,
    message: Vec<usize>,
    /// Noiseless states at every step boundary: (ops applied, state).
    checkpoints: Vec<(usize, FastState)>,
    clean: f64,
}

impl NoisyProgram {
    fn new(instance: &HashInstance, steps: u32) -> Result<Self> {
        let spec = OracleSpec::for_instance(instance);
        let layout = spec.layout();
        let step = build_grover_step(&spec, &layout)?.instantiate()?;
        let mut c: Circuit = build_initialization(&layout);
        let init_len = c.len();
        for _ in 0..steps {
            c.append(&step)?;
        }
        let program = CompiledCircuit::compile(&c)?;
        let mut state = FastState::from_state(&StateVector::new(layout.width())?);
        let mut checkpoints = vec![(0, state.clone())];
        let mut at = 0;
        for b in std::iter::once(init_len).chain((1..=steps as usize).map(|k| init_len + k * step.len())) {
            state.run_range(&program, at..b, &[])?;
            at = b;
            checkpoints.push((b, state.clone()));
        }
        let message = layout.message().to_vec();
        let clean = Self::preimage_mass(&state, &message, instance)?;
        Ok(NoisyProgram { program, steps, message, checkpoints, clean })
    }

    fn preimage_mass(state: &FastState, message: &[usize], instance: &HashInstance) -> Result<f64> {
        let d = state.probabilities(message)?;
        Ok(instance.preimages.iter().map(|&x| d[x as usize]).sum())
    }

    /// Preimage probability of one noisy trajectory.
    fn trajectory(&self, instance: &HashInstance, p: f64, scope: NoiseScope, rng: &mut ChaCha8Rng) -> Result<f64> {
        let len = self.program.len();
        let events = sample_events(&self.program, 0..len, p, scope, rng)?;
        let Some(first) = events.first() else {
            return Ok(self.clean);
        };
        let (start, from) = self.checkpoints.iter().rev().find(|(b, _)| *b <= first.after_op).expect("checkpoint 0");
        let mut state = from.clone();
        state.run_range(&self.program, *start..len, &events)?;
        Self::preimage_mass(&state, &self.message, instance)
    }
}

/// Recovery probability under Pauli noise for two strategies of equal oracle
/// budget: all optimal steps once, or half of them twice.
pub fn noise_sweep(instance: &HashInstance, config: &NoiseSweepConfig) -> Result<Vec<NoiseRow>> {
    if config.trajectories == 0 {
        return Err(Error::InvalidParams("trajectories must be positive".into()));
    }
    for &p in &config.probabilities {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
    }
    let (n, m) = (instance.n(), instance.m() as u64);
    let full_steps = optimal_steps(n, m)?;
    let half_steps = (full_steps / 2).max(1);
    let full = NoisyProgram::new(instance, full_steps)?;
    let half = NoisyProgram::new(instance, half_steps)?;
    let baseline = m as f64 / n as f64;
    let t = config.trajectories;

    let mut rows = Vec::new();
    for (pi, &p) in config.probabilities.iter().enumerate() {
        for (si, (prog, runs)) in [(&full, 1u32), (&half, 2u32)].into_iter().enumerate() {
            let outcomes: Vec<f64> = (0..t)
                .into_par_iter()
                .map(|ti| {
                    let mut miss = 1.0;
                    for r in 0..runs as u64 {
                        let stream = ((pi as u64) << 48) | ((si as u64) << 40) | (ti << 8) | r;
                        let mut rng = stream_rng(config.seed, stream);
                        miss *= 1.0 - prog.trajectory(instance, p, config.scope, &mut rng)?;
                    }
                    Ok(1.0 - miss)
                })
                .collect::<Result<_>>()?;
            let mean = outcomes.iter().sum::<f64>() / t as f64;
            let var = outcomes.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / ((t - 1).max(1)) as f64;
            rows.push(NoiseRow {
                m: instance.m(),
                iv: sponge_iv(instance),
                digest: instance.digest,
                pauli_probability: p,
                scope: config.scope,
                strategy: if runs == 1 { "full" } else { "half" }.to_string(),
                steps: prog.steps,
                runs,
                trajectories: t,
                success: mean,
                success_stderr: (var / t as f64).sqrt(),
                baseline,
                baseline_sigma: (baseline * (1.0 - baseline) / t as f64).sqrt(),
            });
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Named experiments

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    ProbabilityEvolution,
    EarlyStop,
    UnknownM,
    Entropy,
    NoiseSweep,
}

impl Experiment {
    pub const ALL: [Experiment; 5] =
        [Self::ProbabilityEvolution, Self::EarlyStop, Self::UnknownM, Self::Entropy, Self::NoiseSweep];

    pub fn name(self) -> &'static str {
        match self {
            Self::ProbabilityEvolution => "probability-evolution",
            Self::EarlyStop => "early-stop",
            Self::UnknownM => "unknown-m",
            Self::Entropy => "entropy",
            Self::NoiseSweep => "noise-sweep",
        }
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown experiment `{s}`")))
    }
}

/// Knobs shared by the named experiments; `None` means the default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentOptions {
    pub trials: Option<u64>,
    pub trajectories: Option<u64>,
    pub probabilities: Option<Vec<f64>>,
    pub scope: Option<NoiseScope>,
    pub max_steps: Option<u32>,
    pub scan_steps: Option<u32>,
}

pub fn run_experiment(experiment: Experiment, seed: u64, options: &ExperimentOptions) -> Result<ExperimentResult> {
    let started = Instant::now();
    let name = experiment.name();
    match experiment {
        Experiment::ProbabilityEvolution => {
            let instances = standard_instances(&[2, 4, 6])?;
            evolution_result(&instances, options.max_steps.unwrap_or(12), seed)
        }
        Experiment::EarlyStop => {
            let instances = standard_instances(&[2, 4, 6])?;
            let trials = options.trials.unwrap_or(DEFAULT_EARLY_STOP_TRIALS);
            let rows = early_stop_table(&instances, trials, seed)?;
            let params = BTreeMap::from([
                ("instances".to_string(), instance_params(&instances)),
                ("trials".to_string(), json!(trials)),
            ]);
            Ok(ExperimentResult::new(name, seed, started, params, vec![Table::from_rows("cells", &rows)?]))
        }
        Experiment::UnknownM => {
            let instances = standard_instances(&[2, 4, 6])?;
            let trials = options.trials.unwrap_or(DEFAULT_UNKNOWN_M_TRIALS);
            let rows = unknown_m_statistics(&instances, trials, seed)?;
            let params = BTreeMap::from([
                ("instances".to_string(), instance_params(&instances)),
                ("trials".to_string(), json!(trials)),
                ("lambda".to_string(), json!(DEFAULT_LAMBDA)),
                ("max_attempts".to_string(), json!(DEFAULT_MAX_ATTEMPTS)),
            ]);
            Ok(ExperimentResult::new(name, seed, started, params, vec![Table::from_rows("means", &rows)?]))
        }
        Experiment::Entropy => {
            let instances = standard_instances(&[1, 2, 3, 4])?;
            let scan_steps = options.scan_steps.unwrap_or(1);
            let mut steps = Vec::new();
            let mut scan = Vec::new();
            for inst in &instances {
                let k = options.max_steps.unwrap_or(optimal_steps(inst.n(), inst.m() as u64)?);
                let p = entropy_profile(inst, k, scan_steps)?;
                steps.extend(p.steps);
                scan.extend(p.scan);
            }
            let params = BTreeMap::from([
                ("instances".to_string(), instance_params(&instances)),
                ("scan_steps".to_string(), json!(scan_steps)),
            ]);
            Ok(ExperimentResult::new(
                name,
                seed,
                started,
                params,
                vec![Table::from_rows("steps", &steps)?, Table::from_rows("scan", &scan)?],
            ))
        }
        Experiment::NoiseSweep => {
            let instance = standard_instances(&[2])?.remove(0);
            let defaults = NoiseSweepConfig::default();
            let config = NoiseSweepConfig {
                probabilities: options.probabilities.clone().unwrap_or(defaults.probabilities),
                trajectories: options.trajectories.unwrap_or(defaults.trajectories),
                scope: options.scope.unwrap_or(defaults.scope),
                seed,
            };
            let rows = noise_sweep(&instance, &config)?;
            let params = BTreeMap::from([
                ("instances".to_string(), instance_params(std::slice::from_ref(&instance))),
                ("probabilities".to_string(), json!(config.probabilities)),
                ("trajectories".to_string(), json!(config.trajectories)),
                ("scope".to_string(), json!(config.scope)),
            ]);
            Ok(ExperimentResult::new(name, seed, started, params, vec![Table::from_rows("points", &rows)?]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn m2() -> HashInstance {
        standard_instances(&[2]).unwrap().remove(0)
    }

    #[test]
    fn evolution_starts_uniform_and_peaks_at_optimum() {
        let e = probability_evolution(&m2(), 10).unwrap();
        assert_eq!(e.peak_step, 8);
        assert!(e.messages.iter().filter(|r| r.step == 0).all(|r| (r.probability - 1.0 / 256.0).abs() < 1e-12));
        for s in &e.steps {
            assert_abs_diff_eq!(s.preimage_probability, s.analytic_probability, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(e.steps[8].preimage_probability, 0.99562, epsilon = 1e-4);
    }

    #[test]
    fn expected_unknown_m_calls_matches_monte_carlo() {
        let inst = m2();
        let rows = unknown_m_statistics(std::slice::from_ref(&inst), 4000, 3).unwrap();
        let r = &rows[0];
        assert!((r.mean_calls - r.expected_calls).abs() < 4.0 * r.calls_stderr, "{r:?}");
        assert_eq!(r.exhausted, 0);
    }

    #[test]
    fn early_stop_rows_carry_reference_values() {
        let rows = early_stop_table(&[m2()], 200, 1).unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[3].reference_first, Some(1.956));
        assert!(rows.iter().all(|r| (r.expected_samples * r.success_probability - 1.0).abs() < 1e-12));
    }

    #[test]
    fn results_round_trip_to_disk() {
        let dir = tempfile::tempdir().unwrap();
        let opts = ExperimentOptions { trials: Some(50), ..Default::default() };
        let res = run_experiment(Experiment::UnknownM, 9, &opts).unwrap();
        let files = res.write(dir.path()).unwrap();
        assert_eq!(files.len(), 2);
        let csv = fs::read_to_string(dir.path().join("unknown-m.csv")).unwrap();
        assert!(csv.starts_with("m,iv,digest,optimal_steps,trials,mean_calls"));
        let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("unknown-m.json")).unwrap()).unwrap();
        assert_eq!(manifest["seed"], 9);
        assert_eq!(manifest["tables"]["means"].as_array().unwrap().len(), 3);
        // Noiseless experiments are bit-reproducible.
        let again = run_experiment(Experiment::UnknownM, 9, &opts).unwrap();
        assert_eq!(again.tables, res.tables);
    }

    #[test]
    fn experiment_names_parse() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("nope".parse::<Experiment>().is_err());
    }

    #[test]
    fn zero_noise_sweep_is_exact() {
        let cfg = NoiseSweepConfig { probabilities: vec![0.0], trajectories: 3, ..Default::default() };
        let rows = noise_sweep(&m2(), &cfg).unwrap();
        assert_abs_diff_eq!(rows[0].success, analytic_success_probability(256, 2, 8), epsilon = 1e-9);
        let p4 = analytic_success_probability(256, 2, 4);
        assert_abs_diff_eq!(rows[1].success, 1.0 - (1.0 - p4).powi(2), epsilon = 1e-9);
        assert!(rows[0].success_stderr < 1e-12);
    }

    #[test]
    fn empty_tables_keep_their_header() {
        let t = Table::from_rows::<EntropyScanRow>("scan", &[]).unwrap();
        assert_eq!(t.to_csv().unwrap(), "m,iv,digest,step,gate,phase,entropy\n");
        let t = Table::from_rows("steps", &[EntropyStepRow { m: 1, ..Default::default() }]).unwrap();
        assert_eq!(t.rows.len(), 1);
    }
}
