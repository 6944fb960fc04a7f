//! Bit-level simulation of classical reversible circuits.
//!
//! Circuits made of X, CNOT, Toffoli and multi-controlled X gates permute
//! computational basis states, so a single basis state can be pushed through
//! them in time linear in the gate count, whatever the width.

use std::fmt;

use super::{Circuit, Polarity};
use crate::error::{Error, Result};

/// A computational basis state of `width` qubits; qubit `q` is bit `q`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BasisState {
    width: usize,
    words: Vec<u64>,
}

impl BasisState {
    pub fn zero(width: usize) -> Self {
        BasisState { width, words: vec![0; width.div_ceil(64).max(1)] }
    }

    /// Bits of `value` above `width` are discarded.
    pub fn from_u128(width: usize, value: u128) -> Self {
        let mut s = Self::zero(width);
        for q in 0..width.min(128) {
            if (value >> q) & 1 == 1 {
                s.set(q, true);
            }
        }
        s
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, qubit: usize) -> bool {
        debug_assert!(qubit < self.width);
        (self.words[qubit / 64] >> (qubit % 64)) & 1 == 1
    }

    pub fn set(&mut self, qubit: usize, bit: bool) {
        assert!(qubit < self.width, "qubit {qubit} out of range for width {}", self.width);
        let mask = 1u64 << (qubit % 64);
        if bit {
            self.words[qubit / 64] |= mask;
        } else {
            self.words[qubit / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, qubit: usize) {
        self.words[qubit / 64] ^= 1u64 << (qubit % 64);
    }

    /// Low 128 bits as an integer.
    pub fn to_u128(&self) -> u128 {
        self.words.iter().take(2).enumerate().map(|(i, &w)| (w as u128) << (64 * i)).sum()
    }

    /// Reads the listed qubits as an integer, first qubit least significant.
    pub fn read(&self, qubits: &[usize]) -> u64 {
        qubits.iter().enumerate().map(|(i, &q)| (self.get(q) as u64) << i).sum()
    }

    /// Writes `value` into the listed qubits, first qubit least significant.
    pub fn write(&mut self, qubits: &[usize], value: u64) {
        for (i, &q) in qubits.iter().enumerate() {
            self.set(q, (value >> i) & 1 == 1);
        }
    }
}

impl fmt::Debug for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BasisState({}; ", self.width)?;
        for q in (0..self.width).rev() {
            f.write_str(if self.get(q) { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone)]
struct Op {
    controls: Vec<(usize, bool)>,
    target: usize,
}

/// A circuit compiled for repeated basis-state runs.
#[derive(Debug, Clone)]
pub struct ReversibleProgram {
    width: usize,
    ops: Vec<Op>,
}

impl ReversibleProgram {
    /// Classical conditions are resolved from the circuit's register; H and Z
    /// are rejected.
    pub fn compile(circuit: &Circuit) -> Result<Self> {
        let mut ops = Vec::with_capacity(circuit.len());
        for (index, g) in circuit.gates().iter().enumerate() {
            if let Some(bit) = g.condition {
                if !circuit.classical_bits()[bit.0].value {
                    continue;
                }
            }
            if !g.kind.is_classical() {
                return Err(Error::NonClassicalGate { index, kind: g.kind.name() });
            }
            ops.push(Op {
                controls: g.controls.iter().map(|c| (c.qubit, c.polarity == Polarity::One)).collect(),
                target: g.target,
            });
        }
        Ok(ReversibleProgram { width: circuit.width(), ops })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn run(&self, input: &BasisState) -> Result<BasisState> {
        if input.width != self.width {
            return Err(Error::WidthMismatch { expected: self.width, found: input.width });
        }
        let mut s = input.clone();
        for op in &self.ops {
            if op.controls.iter().all(|&(q, want)| s.get(q) == want) {
                s.flip(op.target);
            }
        }
        Ok(s)
    }

    /// Fast path for widths up to 64.
    pub fn run_u64(&self, mut x: u64) -> u64 {
        assert!(self.width <= 64, "run_u64 needs width ≤ 64");
        for op in &self.ops {
            if op.controls.iter().all(|&(q, want)| ((x >> q) & 1 == 1) == want) {
                x ^= 1 << op.target;
            }
        }
        x
    }
}

/// Propagates `input` through a classical reversible circuit.
pub fn reversible_run(circuit: &Circuit, input: &BasisState) -> Result<BasisState> {
    ReversibleProgram::compile(circuit)?.run(input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Control, Gate};

    #[test]
    fn x_on_bit_three() {
        let mut c = Circuit::new(4);
        c.push(Gate::x(3)).unwrap();
        let out = reversible_run(&c, &BasisState::zero(4)).unwrap();
        assert_eq!(out.to_u128(), 0b1000);
    }

    #[test]
    fn hadamard_is_rejected() {
        let mut c = Circuit::new(2);
        c.push(Gate::x(0)).unwrap();
        c.push(Gate::h(1)).unwrap();
        assert!(matches!(
            reversible_run(&c, &BasisState::zero(2)),
            Err(Error::NonClassicalGate { index: 1, kind: "H" })
        ));
    }

    #[test]
    fn polarity_and_conditions() {
        let mut c = Circuit::new(3);
        let off = c.add_classical_bit("off", false);
        c.push(Gate::controlled_x(vec![Control::off(0), Control::on(1)], 2)).unwrap();
        c.push(Gate::x(0).conditioned_on(off)).unwrap();
        let out = reversible_run(&c, &BasisState::from_u128(3, 0b010)).unwrap();
        assert_eq!(out.to_u128(), 0b110);
        let out = reversible_run(&c, &BasisState::from_u128(3, 0b011)).unwrap();
        assert_eq!(out.to_u128(), 0b011);
    }

    #[test]
    fn wide_states_work() {
        let mut c = Circuit::new(200);
        c.push(Gate::x(150)).unwrap();
        c.push(Gate::cnot(150, 3)).unwrap();
        let out = reversible_run(&c, &BasisState::zero(200)).unwrap();
        assert!(out.get(150) && out.get(3));
        assert_eq!(out.read(&[3, 150]), 0b11);
    }

    #[test]
    fn run_u64_agrees_with_run() {
        let mut c = Circuit::new(6);
        c.push(Gate::toffoli(0, 1, 5)).unwrap();
        c.push(Gate::cnot(5, 2)).unwrap();
        let p = ReversibleProgram::compile(&c).unwrap();
        for x in 0..64u64 {
            let slow = p.run(&BasisState::from_u128(6, x as u128)).unwrap().to_u128() as u64;
            assert_eq!(p.run_u64(x), slow);
        }
    }
}
