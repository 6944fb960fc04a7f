//! Grover drivers: known number of preimages, the Boyer–Brassard–Høyer–Tapp
//! loop for an unknown number, and early stopping with resampling.
//!
//! One oracle call is one Grover step. Hadamard re-preparation is free.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::hashes::{HashInstance, HashKind};
use crate::oracles::{build_grover_step, build_initialization, GroverLayout, OracleSpec};
use crate::sim::{sample_index, CompiledCircuit, FastState, StateVector, MAX_DENSE_QUBITS};

pub const DEFAULT_LAMBDA: f64 = 6.0 / 5.0;
pub const DEFAULT_MAX_ATTEMPTS: u32 = 100;
pub const DEFAULT_MAX_SAMPLES: u64 = 10_000;

/// `round(π/4·√(N/M) − 1/2)` with ties rounded down and a floor of 1; 0 when
/// every message is a preimage.
pub fn optimal_steps(n: u64, m: u64) -> Result<u32> {
    if m == 0 {
        return Err(Error::InvalidParams("no preimages (M = 0)".into()));
    }
    if m > n {
        return Err(Error::InvalidParams(format!("M = {m} exceeds N = {n}")));
    }
    if m == n {
        return Ok(0);
    }
    let x = std::f64::consts::FRAC_PI_4 * (n as f64 / m as f64).sqrt() - 0.5;
    Ok(((x - 0.5).ceil() as u32).max(1))
}

/// `sin²((2k+1)·asin(√(M/N)))`.
pub fn analytic_success_probability(n: u64, m: u64, steps: u32) -> f64 {
    let theta = (m as f64 / n as f64).sqrt().asin();
    ((2 * steps + 1) as f64 * theta).sin().powi(2)
}

/// Upper bound `9/4·√(N/M)` on the expected oracle calls of the unknown-M loop.
pub fn bbht_bound(n: u64, m: u64) -> f64 {
    2.25 * (n as f64 / m as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroverRunConfig {
    pub instance: HashInstance,
    /// Grover steps for the known-M driver; derived from M when absent.
    pub steps: Option<u32>,
    pub lambda: f64,
    pub max_samples: u64,
    /// Cap on unknown-M iterations.
    pub max_attempts: u32,
    pub rng_seed: u64,
}

impl GroverRunConfig {
    pub fn new(instance: HashInstance) -> Self {
        GroverRunConfig {
            instance,
            steps: None,
            lambda: DEFAULT_LAMBDA,
            max_samples: DEFAULT_MAX_SAMPLES,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            rng_seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_steps(mut self, steps: u32) -> Self {
        self.steps = Some(steps);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 1.0 && self.lambda <= 4.0 / 3.0) {
            return Err(Error::InvalidParams(format!("lambda {} outside (1, 4/3]", self.lambda)));
        }
        if self.instance.m() == 0 {
            return Err(Error::NoPreimages { digest: self.instance.digest });
        }
        if self.max_samples == 0 || self.max_attempts == 0 {
            return Err(Error::InvalidParams("sample and attempt caps must be positive".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> Result<u32> {
        match self.steps {
            Some(s) => Ok(s),
            None => optimal_steps(self.instance.n(), self.instance.m() as u64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub measured_message: u64,
    pub is_preimage: bool,
    pub oracle_calls: u64,
    pub samples_used: u64,
    /// Set when a sample or attempt cap ended the run without a preimage.
    pub exhausted: bool,
}

/// Noiseless Grover simulator for one instance. States after `k` steps are
/// computed once and their message distributions cached.
#[derive(Debug, Clone)]
pub struct GroverSimulator {
    instance: HashInstance,
    layout: GroverLayout,
    step: CompiledCircuit,
    state: FastState,
    distributions: Vec<Vec<f64>>,
}

impl GroverSimulator {
    pub fn new(instance: &HashInstance) -> Result<Self> {
        if instance.m() == 0 {
            return Err(Error::NoPreimages { digest: instance.digest });
        }
        let spec = OracleSpec::for_instance(instance);
        let layout = spec.layout();
        if layout.width() > MAX_DENSE_QUBITS || instance.hash.kind() == HashKind::Blake {
            return Err(Error::Infeasible(format!(
                "a {}-qubit {} statevector is beyond desk scale; use the reversible check instead",
                layout.width(),
                instance.hash.kind()
            )));
        }
        let step = CompiledCircuit::compile(&build_grover_step(&spec, &layout)?)?;
        let mut state = FastState::from_state(&StateVector::new(layout.width())?);
        state.run(&CompiledCircuit::compile(&build_initialization(&layout))?)?;
        let first = state.probabilities(layout.message())?;
        Ok(GroverSimulator { instance: instance.clone(), layout, step, state, distributions: vec![first] })
    }

    pub fn instance(&self) -> &HashInstance {
        &self.instance
    }

    pub fn layout(&self) -> &GroverLayout {
        &self.layout
    }

    /// Message distribution after `steps` Grover steps.
    pub fn distribution(&mut self, steps: u32) -> Result<&[f64]> {
        while self.distributions.len() <= steps as usize {
            self.state.run(&self.step)?;
            let d = self.state.probabilities(self.layout.message())?;
            self.distributions.push(d);
        }
        Ok(&self.distributions[steps as usize])
    }

    /// Probability that one measurement after `steps` steps is a preimage.
    pub fn success_probability(&mut self, steps: u32) -> Result<f64> {
        let pre = self.instance.preimages.clone();
        let d = self.distribution(steps)?;
        Ok(pre.iter().map(|&m| d[m as usize]).sum())
    }

    fn measure<R: Rng + ?Sized>(&mut self, steps: u32, rng: &mut R) -> Result<(u64, bool)> {
        let d = self.distribution(steps)?;
        let m = sample_index(d, rng) as u64;
        Ok((m, self.instance.is_preimage(m)))
    }

    /// `steps` Grover steps and one measurement.
    pub fn run_known_m<R: Rng + ?Sized>(&mut self, steps: u32, rng: &mut R) -> Result<RunOutcome> {
        let (m, ok) = self.measure(steps, rng)?;
        Ok(RunOutcome { measured_message: m, is_preimage: ok, oracle_calls: steps as u64, samples_used: 1, exhausted: false })
    }

    /// Unknown-M loop: `j` uniform in `0..⌈m⌉`, `j` steps, measure, and on a
    /// miss `m ← min(λm, √N)`.
    pub fn run_unknown_m<R: Rng + ?Sized>(&mut self, lambda: f64, max_attempts: u32, rng: &mut R) -> Result<RunOutcome> {
        let sqrt_n = (self.instance.n() as f64).sqrt();
        let mut m = 1.0f64;
        let mut calls = 0u64;
        let mut last = 0u64;
        for attempt in 1..=max_attempts {
            let j = rng.gen_range(0..m.ceil() as u32);
            let (msg, ok) = self.measure(j, rng)?;
            calls += j as u64;
            last = msg;
            if ok {
                return Ok(RunOutcome {
                    measured_message: msg,
                    is_preimage: true,
                    oracle_calls: calls,
                    samples_used: attempt as u64,
                    exhausted: false,
                });
            }
            m = (lambda * m).min(sqrt_n);
        }
        Ok(RunOutcome {
            measured_message: last,
            is_preimage: false,
            oracle_calls: calls,
            samples_used: max_attempts as u64,
            exhausted: true,
        })
    }

    /// Repeats `steps` Grover steps and a measurement until a preimage shows
    /// up or `max_samples` runs are spent.
    pub fn run_early_stop<R: Rng + ?Sized>(&mut self, steps: u32, max_samples: u64, rng: &mut R) -> Result<RunOutcome> {
        let mut last = 0;
        for sample in 1..=max_samples {
            let (msg, ok) = self.measure(steps, rng)?;
            last = msg;
            if ok {
                return Ok(RunOutcome {
                    measured_message: msg,
                    is_preimage: true,
                    oracle_calls: steps as u64 * sample,
                    samples_used: sample,
                    exhausted: false,
                });
            }
        }
        Ok(RunOutcome {
            measured_message: last,
            is_preimage: false,
            oracle_calls: steps as u64 * max_samples,
            samples_used: max_samples,
            exhausted: true,
        })
    }
}

/// Known-M run with the configured or optimal step count.
pub fn run_known_m(config: &GroverRunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let steps = config.steps()?;
    let mut sim = GroverSimulator::new(&config.instance)?;
    sim.run_known_m(steps, &mut ChaCha8Rng::seed_from_u64(config.rng_seed))
}

pub fn run_unknown_m(config: &GroverRunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let mut sim = GroverSimulator::new(&config.instance)?;
    sim.run_unknown_m(config.lambda, config.max_attempts, &mut ChaCha8Rng::seed_from_u64(config.rng_seed))
}

/// Early-stop run; `steps` must lie in `1..=optimal_steps`.
pub fn run_early_stop(config: &GroverRunConfig, steps: u32) -> Result<RunOutcome> {
    config.validate()?;
    let opt = optimal_steps(config.instance.n(), config.instance.m() as u64)?;
    if steps == 0 || steps > opt.max(1) {
        return Err(Error::InvalidParams(format!("early stop at {steps} steps outside 1..={opt}")));
    }
    let mut sim = GroverSimulator::new(&config.instance)?;
    sim.run_early_stop(steps, config.max_samples, &mut ChaCha8Rng::seed_from_u64(config.rng_seed))
}

/// Full noiseless Grover circuit: initialization followed by `steps` steps.
pub fn build_grover_circuit(instance: &HashInstance, steps: u32) -> Result<Circuit> {
    let spec = OracleSpec::for_instance(instance);
    let layout = spec.layout();
    let mut c = build_initialization(&layout);
    let step = build_grover_step(&spec, &layout)?;
    for _ in 0..steps {
        c.append(&step)?;
    }
    Ok(c)
}
