//! Fast executor for circuits dominated by classical reversible gates.
//!
//! The amplitude array is split into aligned chunks of 2^8 amplitudes and
//! only chunks that may hold a nonzero amplitude are visited. Long runs of
//! basis-permuting gates (X, CNOT, Toffoli, MCX, Z and inserted Paulis) are
//! evaluated bit-sliced: every qubit gets one `u64` per 64 active indices, each
//! gate becomes a handful of word operations, and the accumulated permutation
//! and signs are applied to the amplitudes in one scatter.
//!
//! Results agree exactly with [`StateVector::apply_gate`]: permutations and
//! sign flips are exact, and Hadamards use the same arithmetic.

use std::ops::Range;

use num_complex::Complex64;

use super::{Pauli, StateVector};
use crate::circuit::{Circuit, GateKind, Polarity};
use crate::error::{Error, Result};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MAX_CHUNK_BITS: usize = 8;
/// Batches shorter than this are applied gate by gate.
const SLICE_THRESHOLD: usize = 24;

/// A compiled gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    /// Flip `target` where every `on` bit is 1 and every `off` bit is 0.
    Flip { on: u64, off: u64, target: u8 },
    /// Negate amplitudes whose `qubit` is 1.
    Phase { qubit: u8 },
    Hadamard { qubit: u8 },
}

impl Op {
    /// Mask of qubits the operation acts on.
    pub fn support(&self) -> u64 {
        match *self {
            Op::Flip { on, off, target } => on | off | (1 << target),
            Op::Phase { qubit } | Op::Hadamard { qubit } => 1 << qubit,
        }
    }

    fn is_monomial(&self) -> bool {
        !matches!(self, Op::Hadamard { .. })
    }
}

/// A circuit with conditions resolved, ready for repeated execution.
#[derive(Debug, Clone)]
pub struct CompiledCircuit {
    width: usize,
    ops: Vec<Op>,
    markers: Vec<(String, usize)>,
}

impl CompiledCircuit {
    pub fn compile(circuit: &Circuit) -> Result<Self> {
        if circuit.width() > 64 {
            return Err(Error::Infeasible("compiled execution supports at most 64 qubits".into()));
        }
        let resolved = circuit.resolve_conditions();
        let ops = resolved
            .gates()
            .iter()
            .map(|g| match g.kind {
                GateKind::H => Op::Hadamard { qubit: g.target as u8 },
                GateKind::Z => Op::Phase { qubit: g.target as u8 },
                _ => {
                    let (mut on, mut off) = (0u64, 0u64);
                    for c in &g.controls {
                        match c.polarity {
                            Polarity::One => on |= 1 << c.qubit,
                            Polarity::Zero => off |= 1 << c.qubit,
                        }
                    }
                    Op::Flip { on, off, target: g.target as u8 }
                }
            })
            .collect();
        let markers = resolved.markers().iter().map(|m| (m.name.clone(), m.position)).collect();
        Ok(CompiledCircuit { width: circuit.width(), ops, markers })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Number of operations preceding the named marker.
    pub fn marker(&self, name: &str) -> Option<usize> {
        self.markers.iter().find(|(n, _)| n == name).map(|&(_, p)| p)
    }
}

/// A Pauli inserted right after operation `after_op`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseEvent {
    pub after_op: usize,
    pub qubit: usize,
    pub pauli: Pauli,
}

/// State held by the fast executor.
#[derive(Debug, Clone)]
pub struct FastState {
    width: usize,
    chunk_bits: usize,
    amps: Vec<Complex64>,
    active: Vec<bool>,
    /// Pending global phase i^k from Y insertions.
    phase_pow: u8,
    scratch: Scratch,
}

#[derive(Debug, Clone, Default)]
struct Scratch {
    slices: Vec<u64>,
    sign: Vec<u64>,
    acc: Vec<u64>,
    vals: Vec<Complex64>,
    dest: Vec<u32>,
    chunks: Vec<u32>,
}

impl FastState {
    pub fn from_state(state: &StateVector) -> Self {
        let width = state.num_qubits();
        let chunk_bits = width.min(MAX_CHUNK_BITS);
        let amps = state.amplitudes().to_vec();
        let active = amps.chunks(1 << chunk_bits).map(|c| c.iter().any(|a| *a != ZERO)).collect();
        FastState { width, chunk_bits, amps, active, phase_pow: 0, scratch: Scratch::default() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    fn settle_phase(&mut self) {
        if self.phase_pow.is_multiple_of(4) {
            self.phase_pow = 0;
            return;
        }
        let f = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)]
            [(self.phase_pow % 4) as usize];
        let cs = 1usize << self.chunk_bits;
        for (c, chunk) in self.amps.chunks_mut(cs).enumerate() {
            if self.active[c] {
                chunk.iter_mut().for_each(|a| *a *= f);
            }
        }
        self.phase_pow = 0;
    }

    pub fn to_state(&mut self) -> StateVector {
        self.settle_phase();
        StateVector::from_amplitudes(self.amps.clone()).expect("width already validated")
    }

    /// Nonzero amplitudes with their indices, in index order.
    pub fn nonzero(&mut self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.settle_phase();
        let cs = 1usize << self.chunk_bits;
        let active = &self.active;
        self.amps
            .chunks(cs)
            .enumerate()
            .filter(move |(c, _)| active[*c])
            .flat_map(move |(c, chunk)| {
                chunk.iter().enumerate().filter(|(_, a)| **a != ZERO).map(move |(i, a)| (c * cs + i, *a))
            })
    }

    /// Marginal distribution over `qubits` (see [`StateVector::probabilities`]).
    pub fn probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        if qubits.is_empty() || qubits.iter().any(|&q| q >= self.width) {
            return Err(Error::InvalidParams("invalid qubit list".into()));
        }
        let cs = 1usize << self.chunk_bits;
        let mut out = vec![0.0; 1 << qubits.len()];
        for (c, chunk) in self.amps.chunks(cs).enumerate() {
            if !self.active[c] {
                continue;
            }
            for (i, a) in chunk.iter().enumerate() {
                let p = a.norm_sqr();
                if p != 0.0 {
                    out[super::state::extract(c * cs + i, qubits)] += p;
                }
            }
        }
        Ok(out)
    }

    pub fn run(&mut self, program: &CompiledCircuit) -> Result<()> {
        self.run_range(program, 0..program.len(), &[])
    }

    /// Executes `program.ops()[range]`, inserting the given Paulis (sorted by
    /// `after_op`, indices relative to the whole program).
    pub fn run_range(&mut self, program: &CompiledCircuit, range: Range<usize>, events: &[NoiseEvent]) -> Result<()> {
        if program.width != self.width {
            return Err(Error::WidthMismatch { expected: program.width, found: self.width });
        }
        if range.end > program.len() || range.start > range.end {
            return Err(Error::InvalidParams(format!("op range {range:?} outside 0..{}", program.len())));
        }
        let r = range.clone();
        let mut ev = events.iter().filter(move |e| r.contains(&e.after_op)).peekable();
        let mut batch: Vec<Op> = Vec::with_capacity(range.len().min(8192));
        for i in range {
            let op = program.ops[i];
            if op.is_monomial() {
                batch.push(op);
            } else {
                self.flush(&mut batch);
                self.apply_direct(op);
            }
            while let Some(e) = ev.next_if(|e| e.after_op == i) {
                if e.qubit >= self.width {
                    return Err(Error::QubitOutOfRange { qubit: e.qubit, width: self.width });
                }
                let q = e.qubit as u8;
                match e.pauli {
                    Pauli::X => batch.push(Op::Flip { on: 0, off: 0, target: q }),
                    Pauli::Z => batch.push(Op::Phase { qubit: q }),
                    Pauli::Y => {
                        batch.push(Op::Phase { qubit: q });
                        batch.push(Op::Flip { on: 0, off: 0, target: q });
                        self.phase_pow = (self.phase_pow + 1) % 4;
                    }
                }
            }
        }
        self.flush(&mut batch);
        Ok(())
    }

    fn flush(&mut self, batch: &mut Vec<Op>) {
        if batch.len() >= SLICE_THRESHOLD {
            self.apply_sliced(batch);
        } else {
            for &op in batch.iter() {
                self.apply_direct(op);
            }
        }
        batch.clear();
    }

    fn apply_direct(&mut self, op: Op) {
        let cb = self.chunk_bits;
        let cs = 1usize << cb;
        let lo_mask = (cs - 1) as u64;
        match op {
            Op::Phase { qubit } => {
                let q = qubit as usize;
                for c in 0..self.active.len() {
                    if !self.active[c] {
                        continue;
                    }
                    let chunk = &mut self.amps[c * cs..(c + 1) * cs];
                    if q >= cb {
                        if (c >> (q - cb)) & 1 == 1 {
                            chunk.iter_mut().for_each(|a| *a = -*a);
                        }
                    } else {
                        for (i, a) in chunk.iter_mut().enumerate() {
                            if (i >> q) & 1 == 1 {
                                *a = -*a;
                            }
                        }
                    }
                }
            }
            Op::Flip { on, off, target } => {
                let t = target as usize;
                let (lo_on, lo_off) = ((on & lo_mask) as usize, (off & lo_mask) as usize);
                let (hi_on, hi_off) = ((on >> cb) as usize, (off >> cb) as usize);
                let fires_lo = |i: usize| i & lo_on == lo_on && i & lo_off == 0;
                if t < cb {
                    let bit = 1usize << t;
                    for c in 0..self.active.len() {
                        if !self.active[c] || c & hi_on != hi_on || c & hi_off != 0 {
                            continue;
                        }
                        let chunk = &mut self.amps[c * cs..(c + 1) * cs];
                        for i in 0..cs {
                            if i & bit == 0 && fires_lo(i) {
                                chunk.swap(i, i | bit);
                            }
                        }
                    }
                } else {
                    let cbit = 1usize << (t - cb);
                    for c in 0..self.active.len() {
                        let p = c | cbit;
                        if c & cbit != 0 || !(self.active[c] || self.active[p]) {
                            continue;
                        }
                        // Chunk-level controls are the same for c and p.
                        if c & hi_on != hi_on || c & hi_off != 0 {
                            continue;
                        }
                        let (lo, hi) = self.amps.split_at_mut(p * cs);
                        let (a, b) = (&mut lo[c * cs..(c + 1) * cs], &mut hi[..cs]);
                        if lo_on == 0 && lo_off == 0 {
                            a.swap_with_slice(b);
                            self.active.swap(c, p);
                        } else {
                            for i in 0..cs {
                                if fires_lo(i) {
                                    std::mem::swap(&mut a[i], &mut b[i]);
                                }
                            }
                            self.active[c] = true;
                            self.active[p] = true;
                        }
                    }
                }
            }
            Op::Hadamard { qubit } => {
                let q = qubit as usize;
                let h = |a: Complex64, b: Complex64| ((a + b) * FRAC_1_SQRT_2, (a - b) * FRAC_1_SQRT_2);
                if q < cb {
                    let bit = 1usize << q;
                    for c in 0..self.active.len() {
                        if !self.active[c] {
                            continue;
                        }
                        let chunk = &mut self.amps[c * cs..(c + 1) * cs];
                        for i in (0..cs).filter(|i| i & bit == 0) {
                            (chunk[i], chunk[i | bit]) = h(chunk[i], chunk[i | bit]);
                        }
                    }
                } else {
                    let cbit = 1usize << (q - cb);
                    for c in 0..self.active.len() {
                        let p = c | cbit;
                        if c & cbit != 0 || !(self.active[c] || self.active[p]) {
                            continue;
                        }
                        let (lo, hi) = self.amps.split_at_mut(p * cs);
                        let (a, b) = (&mut lo[c * cs..(c + 1) * cs], &mut hi[..cs]);
                        for i in 0..cs {
                            (a[i], b[i]) = h(a[i], b[i]);
                        }
                        self.active[c] = true;
                        self.active[p] = true;
                    }
                }
            }
        }
    }

    fn apply_sliced(&mut self, batch: &[Op]) {
        let w = self.width;
        let cb = self.chunk_bits;
        let cs = 1usize << cb;
        let s = &mut self.scratch;

        s.chunks.clear();
        s.chunks.extend((0..self.active.len()).filter(|&c| self.active[c]).map(|c| c as u32));
        let n = s.chunks.len() * cs;
        if n == 0 {
            return;
        }
        let words = n.div_ceil(64);

        // Bit-plane q, word k holds bit q of indices 64k..64k+63 of the
        // active-index list.
        s.slices.clear();
        s.slices.resize(w * words, 0);
        if cs >= 64 {
            const PATTERN: [u64; 6] = [
                0xAAAA_AAAA_AAAA_AAAA,
                0xCCCC_CCCC_CCCC_CCCC,
                0xF0F0_F0F0_F0F0_F0F0,
                0xFF00_FF00_FF00_FF00,
                0xFFFF_0000_FFFF_0000,
                0xFFFF_FFFF_0000_0000,
            ];
            let wpc = cs / 64;
            for (ci, &c) in s.chunks.iter().enumerate() {
                for j in 0..wpc {
                    let k = ci * wpc + j;
                    #[allow(clippy::needless_range_loop)]
                    for q in 0..w {
                        s.slices[q * words + k] = if q < 6 {
                            PATTERN[q]
                        } else if q < cb {
                            0u64.wrapping_sub(((j >> (q - 6)) & 1) as u64)
                        } else {
                            0u64.wrapping_sub(((c as usize >> (q - cb)) & 1) as u64)
                        };
                    }
                }
            }
        } else {
            for (e, x) in s.chunks.iter().flat_map(|&c| (0..cs).map(move |i| (c as usize) * cs + i)).enumerate() {
                for q in 0..w {
                    s.slices[q * words + e / 64] |= (((x >> q) & 1) as u64) << (e % 64);
                }
            }
        }
        s.sign.clear();
        s.sign.resize(words, 0);
        s.acc.resize(words, 0);

        for &op in batch {
            match op {
                Op::Phase { qubit } => {
                    let q = qubit as usize;
                    let src = &s.slices[q * words..(q + 1) * words];
                    s.sign.iter_mut().zip(src).for_each(|(d, x)| *d ^= x);
                }
                Op::Flip { on, off, target } => {
                    let t = target as usize;
                    let controls = (on | off).count_ones();
                    if controls == 0 {
                        s.slices[t * words..(t + 1) * words].iter_mut().for_each(|x| *x = !*x);
                        continue;
                    }
                    s.acc.iter_mut().for_each(|x| *x = !0);
                    let mut bits = on | off;
                    while bits != 0 {
                        let q = bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        let src = &s.slices[q * words..(q + 1) * words];
                        if (on >> q) & 1 == 1 {
                            s.acc.iter_mut().zip(src).for_each(|(a, x)| *a &= x);
                        } else {
                            s.acc.iter_mut().zip(src).for_each(|(a, x)| *a &= !x);
                        }
                    }
                    let dst = &mut s.slices[t * words..(t + 1) * words];
                    dst.iter_mut().zip(&s.acc).for_each(|(d, a)| *d ^= a);
                }
                Op::Hadamard { .. } => unreachable!("batches hold monomial ops only"),
            }
        }

        // Destination index of every active index.
        s.dest.clear();
        s.dest.resize(words * 64, 0);
        for q in 0..w {
            let plane = &s.slices[q * words..(q + 1) * words];
            for (k, &word) in plane.iter().enumerate() {
                let out = &mut s.dest[k * 64..(k + 1) * 64];
                for (b, d) in out.iter_mut().enumerate() {
                    *d |= (((word >> b) & 1) as u32) << q;
                }
            }
        }

        s.vals.clear();
        for &c in &s.chunks {
            let c = c as usize;
            s.vals.extend_from_slice(&self.amps[c * cs..(c + 1) * cs]);
            self.amps[c * cs..(c + 1) * cs].fill(ZERO);
            self.active[c] = false;
        }
        for e in 0..n {
            let v = s.vals[e];
            if v == ZERO {
                continue;
            }
            let d = s.dest[e] as usize;
            self.amps[d] = if (s.sign[e / 64] >> (e % 64)) & 1 == 1 { -v } else { v };
            self.active[d >> cb] = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Control, Gate};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_circuit(width: usize, len: usize, seed: u64, with_h: bool) -> Circuit {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Circuit::new(width);
        while c.len() < len {
            let kind = rng.gen_range(0..if with_h { 6 } else { 5 });
            let mut qs: Vec<usize> = (0..width).collect();
            for i in 0..width {
                let j = rng.gen_range(i..width);
                qs.swap(i, j);
            }
            let g = match kind {
                0 => Gate::x(qs[0]),
                1 => Gate::z(qs[0]),
                2 => Gate::cnot(qs[0], qs[1]),
                3 => Gate::controlled_x(vec![Control::on(qs[0]), Control::off(qs[1])], qs[2]),
                4 if width >= 4 => {
                    let k = rng.gen_range(3..=(width - 1).min(5));
                    let controls = qs[1..=k].iter().map(|&q| Control::matching(q, rng.gen())).collect();
                    Gate::controlled_x(controls, qs[0])
                }
                5 => Gate::h(qs[0]),
                _ => continue,
            };
            c.push(g).unwrap();
        }
        c
    }

    fn random_state(width: usize, seed: u64, sparse: bool) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps: Vec<Complex64> = (0..1usize << width)
            .map(|i| {
                if sparse && (i >> 3) % 5 != 0 {
                    ZERO
                } else {
                    Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                }
            })
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
    }

    #[test]
    fn matches_dense_reference_exactly() {
        for (width, seed) in [(3usize, 1u64), (5, 2), (7, 3), (10, 4), (11, 5)] {
            for with_h in [false, true] {
                for sparse in [false, true] {
                    let circuit = random_circuit(width, 120, seed, with_h);
                    let init = random_state(width, seed + 100, sparse);
                    let mut dense = init.clone();
                    dense.apply_circuit(&circuit).unwrap();
                    let mut fast = FastState::from_state(&init);
                    fast.run(&CompiledCircuit::compile(&circuit).unwrap()).unwrap();
                    assert_eq!(fast.to_state(), dense, "width={width} h={with_h} sparse={sparse}");
                }
            }
        }
    }

    #[test]
    fn paulis_match_dense_application() {
        let width = 9;
        let circuit = random_circuit(width, 60, 9, true);
        let program = CompiledCircuit::compile(&circuit).unwrap();
        let events = [
            NoiseEvent { after_op: 3, qubit: 8, pauli: Pauli::Y },
            NoiseEvent { after_op: 3, qubit: 1, pauli: Pauli::Z },
            NoiseEvent { after_op: 40, qubit: 2, pauli: Pauli::X },
            NoiseEvent { after_op: 59, qubit: 0, pauli: Pauli::Y },
        ];
        let init = random_state(width, 17, false);
        let mut dense = init.clone();
        for (i, g) in circuit.gates().iter().enumerate() {
            dense.apply_gate(g).unwrap();
            for e in events.iter().filter(|e| e.after_op == i) {
                dense.apply_pauli(e.qubit, e.pauli).unwrap();
            }
        }
        let mut fast = FastState::from_state(&init);
        fast.run_range(&program, 0..program.len(), &events).unwrap();
        let got = fast.to_state();
        for (a, b) in got.amplitudes().iter().zip(dense.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn split_ranges_compose() {
        let circuit = random_circuit(10, 200, 21, true);
        let program = CompiledCircuit::compile(&circuit).unwrap();
        let init = random_state(10, 22, true);
        let mut whole = FastState::from_state(&init);
        whole.run(&program).unwrap();
        let mut parts = FastState::from_state(&init);
        parts.run_range(&program, 0..77, &[]).unwrap();
        parts.run_range(&program, 77..200, &[]).unwrap();
        assert_eq!(whole.to_state(), parts.to_state());
    }

    #[test]
    fn marginals_and_nonzero_agree_with_dense() {
        let init = random_state(10, 5, true);
        let mut fast = FastState::from_state(&init);
        assert_eq!(fast.probabilities(&[0, 4, 9]).unwrap(), init.probabilities(&[0, 4, 9]).unwrap());
        let nz: Vec<_> = fast.nonzero().collect();
        let expect: Vec<_> =
            init.amplitudes().iter().enumerate().filter(|(_, a)| **a != ZERO).map(|(i, a)| (i, *a)).collect();
        assert_eq!(nz, expect);
    }
}
