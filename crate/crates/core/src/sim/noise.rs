//! Stochastic Pauli noise by trajectory sampling.
//!
//! After every gate each eligible qubit independently suffers, with
//! probability `p`, one Pauli drawn uniformly from {X, Y, Z}. Which qubits are
//! eligible is set by [`NoiseScope`]. Faults are sampled by geometric skipping
//! over the flattened (gate, qubit) opportunity sequence, so the cost is
//! proportional to the number of faults rather than the number of gates.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use super::engine::{CompiledCircuit, FastState, NoiseEvent};
use super::{Pauli, StateVector};
use crate::circuit::Circuit;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseScope {
    /// Only the qubits the gate acted on (three for a Toffoli).
    #[default]
    TouchedQubits,
    /// Every qubit of the register, idle or not.
    AllQubits,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub pauli_probability: f64,
    pub rng_seed: u64,
    #[serde(default)]
    pub scope: NoiseScope,
}

impl NoiseModel {
    pub fn new(pauli_probability: f64, rng_seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&pauli_probability) {
            return Err(Error::InvalidProbability(pauli_probability));
        }
        Ok(NoiseModel { pauli_probability, rng_seed, scope: NoiseScope::default() })
    }

    pub fn with_scope(mut self, scope: NoiseScope) -> Self {
        self.scope = scope;
        self
    }
}

/// Draws the faults of one trajectory through `ops` operations of `program`
/// starting at `offset`. Event indices are absolute.
pub fn sample_events<R: Rng + ?Sized>(
    program: &CompiledCircuit,
    range: std::ops::Range<usize>,
    p: f64,
    scope: NoiseScope,
    rng: &mut R,
) -> Result<Vec<NoiseEvent>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let mut events = Vec::new();
    if p == 0.0 || range.is_empty() {
        return Ok(events);
    }
    let geo = Geometric::new(p).map_err(|_| Error::InvalidProbability(p))?;
    let width = program.width() as u64;
    let ops = &program.ops()[range.clone()];
    // `skip` counts opportunities to pass over before the next fault.
    let mut skip = geo.sample(rng);
    for (i, op) in ops.iter().enumerate() {
        let mask = match scope {
            NoiseScope::TouchedQubits => op.support(),
            NoiseScope::AllQubits => {
                if width == 64 {
                    u64::MAX
                } else {
                    (1u64 << width) - 1
                }
            }
        };
        let count = mask.count_ones() as u64;
        let mut seen = 0u64;
        while skip < count - seen {
            // Fault on the (seen + skip)-th eligible qubit of this gate.
            let nth = seen + skip;
            let qubit = nth_set_bit(mask, nth as u32);
            let pauli = [Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)];
            events.push(NoiseEvent { after_op: range.start + i, qubit, pauli });
            seen = nth + 1;
            skip = geo.sample(rng);
        }
        skip -= count - seen;
    }
    Ok(events)
}

fn nth_set_bit(mut mask: u64, n: u32) -> usize {
    for _ in 0..n {
        mask &= mask - 1;
    }
    mask.trailing_zeros() as usize
}

/// Runs `circuit` on `initial` with Paulis inserted according to `noise`.
/// The generator is seeded from `noise.rng_seed`.
pub fn run_noisy_trajectory(circuit: &Circuit, noise: &NoiseModel, initial: &StateVector) -> Result<StateVector> {
    if circuit.width() != initial.num_qubits() {
        return Err(Error::WidthMismatch { expected: circuit.width(), found: initial.num_qubits() });
    }
    let program = CompiledCircuit::compile(circuit)?;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.rng_seed);
    let events = sample_events(&program, 0..program.len(), noise.pauli_probability, noise.scope, &mut rng)?;
    let mut state = FastState::from_state(initial);
    state.run_range(&program, 0..program.len(), &events)?;
    Ok(state.to_state())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use num_complex::Complex64;

    #[test]
    fn zero_noise_is_exact() {
        let mut c = Circuit::new(3);
        c.push(Gate::h(0)).unwrap();
        c.push(Gate::cnot(0, 1)).unwrap();
        c.push(Gate::toffoli(0, 1, 2)).unwrap();
        let init = StateVector::new(3).unwrap();
        let mut clean = init.clone();
        clean.apply_circuit(&c).unwrap();
        let noisy = run_noisy_trajectory(&c, &NoiseModel::new(0.0, 5).unwrap(), &init).unwrap();
        assert_eq!(noisy, clean);
    }

    #[test]
    fn certain_noise_branches_evenly() {
        let mut c = Circuit::new(1);
        c.push(Gate::x(0)).unwrap();
        let init = StateVector::new(1).unwrap();
        let mut counts = [0usize; 3];
        let trials = 10_000;
        for seed in 0..trials {
            let out = run_noisy_trajectory(&c, &NoiseModel::new(1.0, seed).unwrap(), &init).unwrap();
            let a = out.amplitudes();
            // X·X|0⟩ = |0⟩, Y·X|0⟩ = -i|0⟩, Z·X|0⟩ = -|1⟩.
            if a[0] == Complex64::new(1.0, 0.0) {
                counts[0] += 1;
            } else if a[0] == Complex64::new(0.0, -1.0) {
                counts[1] += 1;
            } else {
                assert_eq!(a[1], Complex64::new(-1.0, 0.0));
                counts[2] += 1;
            }
        }
        for k in counts {
            assert!((k as f64 / trials as f64 - 1.0 / 3.0).abs() < 0.05, "{counts:?}");
        }
    }

    #[test]
    fn probability_is_validated() {
        assert!(matches!(NoiseModel::new(1.5, 0), Err(Error::InvalidProbability(_))));
        assert!(NoiseModel::new(-0.1, 0).is_err());
    }

    #[test]
    fn fault_rate_matches_opportunity_count() {
        let mut c = Circuit::new(5);
        for i in 0..200 {
            c.push(Gate::toffoli(i % 5, (i + 1) % 5, (i + 2) % 5)).unwrap();
        }
        let program = CompiledCircuit::compile(&c).unwrap();
        let p = 0.01;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (mut touched, mut all) = (0usize, 0usize);
        let runs = 400;
        for _ in 0..runs {
            let ev = sample_events(&program, 0..200, p, NoiseScope::TouchedQubits, &mut rng).unwrap();
            assert!(ev.iter().all(|e| program.ops()[e.after_op].support() >> e.qubit & 1 == 1));
            touched += ev.len();
            all += sample_events(&program, 0..200, p, NoiseScope::AllQubits, &mut rng).unwrap().len();
        }
        let (mt, ma) = (touched as f64 / runs as f64, all as f64 / runs as f64);
        // Expected 6 and 10 faults per run.
        assert!((mt - 6.0).abs() < 0.4, "{mt}");
        assert!((ma - 10.0).abs() < 0.5, "{ma}");
    }

    #[test]
    fn nth_bit() {
        assert_eq!(nth_set_bit(0b1011_0100, 0), 2);
        assert_eq!(nth_set_bit(0b1011_0100, 2), 5);
        assert_eq!(nth_set_bit(0b1011_0100, 3), 7);
    }
}
