use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Pauli;
use crate::circuit::{Circuit, Gate, GateKind, Polarity};
use crate::error::{Error, Result};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Dense state of `num_qubits` qubits. Qubit `q` is bit `q` of the amplitude
/// index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

/// Upper bound on the width of a dense state.
pub const MAX_DENSE_QUBITS: usize = 30;

fn check_width(num_qubits: usize) -> Result<()> {
    if num_qubits > MAX_DENSE_QUBITS {
        return Err(Error::Infeasible(format!(
            "a dense state of {num_qubits} qubits needs 2^{num_qubits} amplitudes"
        )));
    }
    Ok(())
}

impl StateVector {
    /// |0…0⟩.
    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_width(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidParams(format!("basis index {index} ≥ 2^{num_qubits}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// Takes amplitudes as given; the caller is responsible for normalization.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if !dim.is_power_of_two() {
            return Err(Error::InvalidParams(format!("amplitude count {dim} is not a power of two")));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        check_width(num_qubits)?;
        Ok(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::WidthMismatch { expected: self.num_qubits, found: other.num_qubits });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitOutOfRange { qubit: q, width: self.num_qubits });
        }
        Ok(())
    }

    /// Applies a single gate. Multi-controlled gates and control-on-0 polarity
    /// act natively; a classically conditioned gate is an error because its
    /// condition can only be resolved against a circuit.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        if gate.condition.is_some() {
            return Err(Error::UnresolvedCondition { index: 0 });
        }
        match gate.kind {
            GateKind::H => self.hadamard(gate.target),
            GateKind::Z => self.phase_flip(gate.target),
            GateKind::X | GateKind::Cnot | GateKind::Toffoli | GateKind::MultiCx => {
                let (mut on, mut off) = (0usize, 0usize);
                for c in &gate.controls {
                    match c.polarity {
                        Polarity::One => on |= 1 << c.qubit,
                        Polarity::Zero => off |= 1 << c.qubit,
                    }
                }
                self.controlled_flip(on, off, gate.target);
            }
        }
        Ok(())
    }

    /// Applies every gate of `circuit`, resolving classical conditions
    /// against its register.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.width() != self.num_qubits {
            return Err(Error::WidthMismatch { expected: circuit.width(), found: self.num_qubits });
        }
        for g in circuit.gates() {
            if let Some(b) = g.condition {
                if !circuit.classical_bits()[b.0].value {
                    continue;
                }
                let mut g = g.clone();
                g.condition = None;
                self.apply_gate(&g)?;
            } else {
                self.apply_gate(g)?;
            }
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) -> Result<()> {
        self.check_qubit(qubit)?;
        let i = Complex64::new(0.0, 1.0);
        match pauli {
            Pauli::X => self.controlled_flip(0, 0, qubit),
            Pauli::Z => self.phase_flip(qubit),
            Pauli::Y => {
                // Y = i·X·Z
                self.phase_flip(qubit);
                self.controlled_flip(0, 0, qubit);
                self.amps.iter_mut().for_each(|a| *a *= i);
            }
        }
        Ok(())
    }

    fn hadamard(&mut self, q: usize) {
        let bit = 1usize << q;
        for base in (0..self.amps.len()).filter(|x| x & bit == 0) {
            let (a, b) = (self.amps[base], self.amps[base | bit]);
            self.amps[base] = (a + b) * FRAC_1_SQRT_2;
            self.amps[base | bit] = (a - b) * FRAC_1_SQRT_2;
        }
    }

    fn phase_flip(&mut self, q: usize) {
        let bit = 1usize << q;
        for (x, a) in self.amps.iter_mut().enumerate() {
            if x & bit != 0 {
                *a = -*a;
            }
        }
    }

    fn controlled_flip(&mut self, on: usize, off: usize, target: usize) {
        let bit = 1usize << target;
        for x in 0..self.amps.len() {
            if x & bit == 0 && x & on == on && x & off == 0 {
                self.amps.swap(x, x | bit);
            }
        }
    }

    fn check_qubit_list(&self, qubits: &[usize]) -> Result<()> {
        if qubits.is_empty() {
            return Err(Error::InvalidParams("qubit list is empty".into()));
        }
        for (i, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    /// Marginal distribution over `qubits`. Entry `k` is the probability of the
    /// outcome whose `i`-th listed qubit equals bit `i` of `k`.
    pub fn probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        self.check_qubit_list(qubits)?;
        let mut out = vec![0.0; 1 << qubits.len()];
        for (x, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p != 0.0 {
                out[extract(x, qubits)] += p;
            }
        }
        Ok(out)
    }

    /// One outcome drawn from [`StateVector::probabilities`].
    pub fn sample<R: Rng + ?Sized>(&self, qubits: &[usize], rng: &mut R) -> Result<u64> {
        let probs = self.probabilities(qubits)?;
        Ok(sample_index(&probs, rng) as u64)
    }

    /// [`StateVector::sample`] with a fresh generator seeded from `seed`.
    pub fn sample_seeded(&self, qubits: &[usize], seed: u64) -> Result<u64> {
        self.sample(qubits, &mut ChaCha8Rng::seed_from_u64(seed))
    }
}

/// Packs the listed bits of `x` into an integer, first qubit lowest.
pub(crate) fn extract(x: usize, qubits: &[usize]) -> usize {
    qubits.iter().enumerate().fold(0, |acc, (i, &q)| acc | (((x >> q) & 1) << i))
}

/// Inverse-CDF draw from an (approximately normalized) distribution.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, &p) in probs.iter().enumerate() {
        if u < p {
            return i;
        }
        u -= p;
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}
