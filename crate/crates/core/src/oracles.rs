//! Grover oracles for the two toy hashes, the diffusion operator and the
//! composed Grover step.
//!
//! Word rotations are register relabelings and cost no gates. The oracle
//! computes the hash into the state registers, flips the Grover ancilla when
//! the rate (sponge) or `v[0] v[1]` (blake) matches the target digest, and
//! uncomputes by replaying the same gates in reverse.

use crate::circuit::{
    add_mod2n, rotate_with_swaps, xor_into, Circuit, Control, Direction, Gate, RegisterMap, ReversibleProgram,
};
use crate::error::{Error, Result};
use crate::hashes::{
    blake_init, schedule, BlakeParams, HashInstance, HashKind, HashSpec, SpongeParams, ToyHash, Word4,
};

/// Marker placed right after the digest-matching multi-controlled X.
pub const MID_MARKER: &str = "mid";
/// Marker placed between oracle and diffusion in a Grover step.
pub const DIFFUSION_MARKER: &str = "diffusion";

/// How word rotations are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RotationMode {
    /// Relabel the register map, no gates.
    #[default]
    Relabel,
    /// Move qubit contents with SWAP networks.
    Swaps,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSpec {
    pub target_digest: u8,
    pub hash: HashSpec,
    /// 1 runs the adders of a pass one after the other; 2 gives each of the
    /// two concurrent quarter rounds its own ancilla.
    pub adder_ancillas: usize,
}

impl OracleSpec {
    pub fn new(hash: HashSpec, target_digest: u8) -> Self {
        OracleSpec { target_digest, hash, adder_ancillas: 2 }
    }

    pub fn for_instance(instance: &HashInstance) -> Self {
        Self::new(instance.hash, instance.digest)
    }

    pub fn with_adder_ancillas(mut self, count: usize) -> Result<Self> {
        if !(1..=2).contains(&count) {
            return Err(Error::InvalidParams(format!("adder ancilla count must be 1 or 2, got {count}")));
        }
        self.adder_ancillas = count;
        Ok(self)
    }

    pub fn layout(&self) -> GroverLayout {
        GroverLayout::for_kind(self.hash.kind(), self.adder_ancillas)
    }
}

/// Physical qubit assignment of a Grover register.
///
/// Message bit `i` always sits on qubit `i`, so a measurement of the message
/// register reads the message directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroverLayout {
    kind: HashKind,
    width: usize,
    message: Vec<usize>,
    /// `v0..v3` for both kinds, plus `d0..d3` for blake.
    words: RegisterMap,
    grover_ancilla: usize,
    adder_ancillas: Vec<usize>,
}

fn nibble(base: usize) -> Vec<usize> {
    (base..base + 4).collect()
}

impl GroverLayout {
    /// 16 state qubits, the adder ancillas and the Grover ancilla.
    ///
    /// The rate `v0 v1` is the message register: `v1` on qubits 0..4 and
    /// `v0` on 4..8, matching `message = v0 << 4 | v1`.
    pub fn sponge(adder_ancillas: usize) -> Self {
        let words = RegisterMap::new()
            .with("v0", nibble(4))
            .and_then(|m| m.with("v1", nibble(0)))
            .and_then(|m| m.with("v2", nibble(12)))
            .and_then(|m| m.with("v3", nibble(8)))
            .expect("static layout");
        let adders: Vec<usize> = (16..16 + adder_ancillas).collect();
        let grover = 16 + adder_ancillas;
        GroverLayout {
            kind: HashKind::Sponge,
            width: grover + 1,
            message: (0..8).collect(),
            words,
            grover_ancilla: grover,
            adder_ancillas: adders,
        }
    }

    /// Message block `d` on qubits 0..16 (`d0` is the top nibble), working
    /// vector `v` on 16..32, then the adder ancillas and the Grover ancilla.
    pub fn blake(adder_ancillas: usize) -> Self {
        let words = RegisterMap::new()
            .with("d0", nibble(12))
            .and_then(|m| m.with("d1", nibble(8)))
            .and_then(|m| m.with("d2", nibble(4)))
            .and_then(|m| m.with("d3", nibble(0)))
            .and_then(|m| m.with("v0", nibble(20)))
            .and_then(|m| m.with("v1", nibble(16)))
            .and_then(|m| m.with("v2", nibble(28)))
            .and_then(|m| m.with("v3", nibble(24)))
            .expect("static layout");
        let adders: Vec<usize> = (32..32 + adder_ancillas).collect();
        let grover = 32 + adder_ancillas;
        GroverLayout {
            kind: HashKind::Blake,
            width: grover + 1,
            message: (0..16).collect(),
            words,
            grover_ancilla: grover,
            adder_ancillas: adders,
        }
    }

    pub fn for_kind(kind: HashKind, adder_ancillas: usize) -> Self {
        match kind {
            HashKind::Sponge => Self::sponge(adder_ancillas),
            HashKind::Blake => Self::blake(adder_ancillas),
        }
    }

    pub fn kind(&self) -> HashKind {
        self.kind
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn message(&self) -> &[usize] {
        &self.message
    }

    pub fn words(&self) -> &RegisterMap {
        &self.words
    }

    pub fn word(&self, name: &str) -> &[usize] {
        self.words.get(name).expect("layout word")
    }

    /// Qubits of `v0..v3`, `v0` first.
    pub fn state_words(&self) -> [&[usize]; 4] {
        ["v0", "v1", "v2", "v3"].map(|n| self.word(n))
    }

    pub fn grover_ancilla(&self) -> usize {
        self.grover_ancilla
    }

    pub fn adder_ancillas(&self) -> &[usize] {
        &self.adder_ancillas
    }

    /// Qubit borrowed by multi-controlled X decompositions.
    pub fn work_qubit(&self) -> usize {
        self.adder_ancillas[0]
    }

    /// Qubits of the 16-bit permutation state (sponge) or working vector
    /// (blake).
    pub fn state_qubits(&self) -> Vec<usize> {
        self.state_words().iter().flat_map(|w| w.iter().copied()).collect()
    }

    fn check(&self, spec: &OracleSpec) -> Result<()> {
        if spec.hash.kind() != self.kind {
            return Err(Error::InvalidParams(format!("{} oracle on a {} layout", spec.hash.kind(), self.kind)));
        }
        if self.adder_ancillas.len() < spec.adder_ancillas {
            return Err(Error::InvalidParams(format!(
                "layout has {} adder ancillas, oracle needs {}",
                self.adder_ancillas.len(),
                spec.adder_ancillas
            )));
        }
        Ok(())
    }

    fn empty_circuit(&self) -> Circuit {
        let mut c = Circuit::with_registers(self.width, self.words.clone()).expect("layout fits");
        c.set_work_qubit(self.work_qubit()).expect("layout fits");
        c
    }
}

/// Mutable view of the words during construction: the register map tracks
/// where each logical word currently lives after relabelings.
struct Builder<'a> {
    circuit: Circuit,
    map: RegisterMap,
    mode: RotationMode,
    ancillas: &'a [usize],
}

impl Builder<'_> {
    fn word(&self, name: &str) -> Vec<usize> {
        self.map.get(name).expect("known word").to_vec()
    }

    fn add(&mut self, a: &str, b: &str, lane: usize) -> Result<()> {
        let (qa, qb) = (self.word(a), self.word(b));
        add_mod2n(&mut self.circuit, &qa, &qb, self.ancillas[lane % self.ancillas.len()])
    }

    fn xor(&mut self, source: &str, dest: &str) -> Result<()> {
        let (qs, qd) = (self.word(source), self.word(dest));
        xor_into(&mut self.circuit, &qs, &qd)
    }

    fn rotate(&mut self, name: &str, amount: usize, dir: Direction) -> Result<()> {
        match self.mode {
            RotationMode::Relabel => self.map.rotate(name, amount, dir),
            RotationMode::Swaps => {
                let q = self.word(name);
                rotate_with_swaps(&mut self.circuit, &q, amount, dir)
            }
        }
    }

    fn qr(&mut self, a: &str, b: &str, lane: usize) -> Result<()> {
        self.add(a, b, lane)?;
        self.xor(a, b)?;
        self.rotate(b, 2, Direction::Left)?;
        self.add(a, b, lane)?;
        self.xor(a, b)?;
        self.rotate(b, 1, Direction::Left)
    }

    fn g(&mut self, a: &str, b: &str, x: &str, y: &str, lane: usize) -> Result<()> {
        self.add(a, b, lane)?;
        self.add(a, x, lane)?;
        self.xor(a, b)?;
        self.rotate(b, 2, Direction::Right)?;
        self.add(a, b, lane)?;
        self.add(a, y, lane)?;
        self.xor(a, b)?;
        self.rotate(b, 1, Direction::Right)
    }
}

/// Quantum `chacha_pi` on the sponge state words. Returns the circuit and the
/// register map giving each word's final location.
pub fn build_sponge_permutation(
    layout: &GroverLayout,
    rounds: u32,
    adder_ancillas: usize,
    mode: RotationMode,
) -> Result<(Circuit, RegisterMap)> {
    if layout.kind != HashKind::Sponge {
        return Err(Error::InvalidParams("sponge permutation needs a sponge layout".into()));
    }
    let mut b = Builder {
        circuit: layout.empty_circuit(),
        map: layout.words.clone(),
        mode,
        ancillas: &layout.adder_ancillas[..adder_ancillas.min(layout.adder_ancillas.len()).max(1)],
    };
    for _ in 0..rounds {
        b.qr("v0", "v2", 0)?;
        b.qr("v1", "v3", 1)?;
        b.qr("v0", "v3", 0)?;
        b.qr("v1", "v2", 1)?;
    }
    Ok((b.circuit, b.map))
}

/// Quantum blake compression rounds on `v`, reading the message words `d`
/// through the schedule. Initialization of `v` is not included.
pub fn build_blake_compression(
    layout: &GroverLayout,
    rho: u32,
    adder_ancillas: usize,
    mode: RotationMode,
) -> Result<(Circuit, RegisterMap)> {
    if layout.kind != HashKind::Blake {
        return Err(Error::InvalidParams("blake compression needs a blake layout".into()));
    }
    let mut b = Builder {
        circuit: layout.empty_circuit(),
        map: layout.words.clone(),
        mode,
        ancillas: &layout.adder_ancillas[..adder_ancillas.min(layout.adder_ancillas.len()).max(1)],
    };
    const D: [&str; 4] = ["d0", "d1", "d2", "d3"];
    for r in 0..rho {
        let s = schedule(r);
        let (x0, y0, x1, y1) = (D[s[0]], D[s[1]], D[s[2]], D[s[3]]);
        b.g("v0", "v2", x0, y0, 0)?;
        b.g("v1", "v3", x1, y1, 1)?;
        b.g("v0", "v3", x0, y0, 0)?;
        b.g("v1", "v2", x1, y1, 1)?;
    }
    Ok((b.circuit, b.map))
}

/// X gates on the state words conditioned on classical bits holding `words`.
fn constant_layer(circuit: &mut Circuit, layout: &GroverLayout, prefix: &str, words: [Word4; 4]) -> Result<()> {
    for (k, (qubits, w)) in layout.state_words().iter().zip(words).enumerate() {
        for (i, &q) in qubits.iter().enumerate() {
            let bit = circuit.add_classical_bit(format!("{prefix}{k}_{i}"), (w.value() >> i) & 1 == 1);
            circuit.push(Gate::x(q).conditioned_on(bit))?;
        }
    }
    Ok(())
}

/// Multi-controlled X from the digest words onto the Grover ancilla, with
/// control-on-0 for the zero bits of `digest`. `hi` holds the digest's top
/// nibble.
fn digest_check(circuit: &mut Circuit, hi: &[usize], lo: &[usize], digest: u8, target: usize) -> Result<()> {
    let controls = lo
        .iter()
        .chain(hi)
        .enumerate()
        .map(|(j, &q)| Control::matching(q, (digest >> j) & 1 == 1))
        .collect();
    circuit.push(Gate::controlled_x(controls, target))
}

fn sandwich(
    layout: &GroverLayout,
    prefix: &str,
    init: [Word4; 4],
    compute: &Circuit,
    map: &RegisterMap,
    digest: u8,
) -> Result<Circuit> {
    let mut c = layout.empty_circuit();
    constant_layer(&mut c, layout, prefix, init)?;
    c.append(compute)?;
    digest_check(&mut c, map.get("v0")?, map.get("v1")?, digest, layout.grover_ancilla)?;
    c.mark(MID_MARKER);
    c.append(&compute.inverse())?;
    constant_layer(&mut c, layout, prefix, init)?;
    Ok(c)
}

/// Sponge oracle: IV layer, permutation, digest check, inverse permutation,
/// IV layer. On `|m⟩|0⟩|−⟩` it negates exactly the preimages of the target.
pub fn build_sponge_oracle(spec: &OracleSpec, layout: &GroverLayout) -> Result<Circuit> {
    layout.check(spec)?;
    let HashSpec::Sponge(SpongeParams { iv, rounds }) = spec.hash else {
        unreachable!("checked by layout")
    };
    let (perm, map) = build_sponge_permutation(layout, rounds, spec.adder_ancillas, RotationMode::Relabel)?;
    let init = crate::hashes::SpongeState::from_u16(iv).v;
    sandwich(layout, "iv", init, &perm, &map, spec.target_digest)
}

/// Blake oracle: classical initialization of `v`, compression, digest check on
/// `v[0] v[1]`, inverse compression, de-initialization. `d` is only read.
pub fn build_blake_oracle(spec: &OracleSpec, layout: &GroverLayout) -> Result<Circuit> {
    layout.check(spec)?;
    let HashSpec::Blake(BlakeParams { t, last, rho }) = spec.hash else {
        unreachable!("checked by layout")
    };
    let (comp, map) = build_blake_compression(layout, rho, spec.adder_ancillas, RotationMode::Relabel)?;
    sandwich(layout, "vinit", blake_init(t, last), &comp, &map, spec.target_digest)
}

pub fn build_oracle(spec: &OracleSpec, layout: &GroverLayout) -> Result<Circuit> {
    match spec.hash.kind() {
        HashKind::Sponge => build_sponge_oracle(spec, layout),
        HashKind::Blake => build_blake_oracle(spec, layout),
    }
}

/// Outcome of running an oracle on every message as a basis state.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct OracleCheck {
    pub kind: HashKind,
    pub digest: u8,
    pub messages: u64,
    /// Messages whose Grover ancilla was flipped.
    pub flagged: Vec<u64>,
    /// Messages hashing to the digest classically.
    pub expected: Vec<u64>,
    /// Messages after which some register other than the Grover ancilla was
    /// not restored.
    pub dirty: Vec<u64>,
}

impl OracleCheck {
    pub fn passed(&self) -> bool {
        self.flagged == self.expected && self.dirty.is_empty()
    }
}

/// Runs the elementary oracle of `spec` on `|m⟩|0…0⟩` for every message `m`
/// with the reversible simulator and compares against the classical hash.
pub fn check_oracle_reversibly(spec: &OracleSpec) -> Result<OracleCheck> {
    let layout = spec.layout();
    let program = ReversibleProgram::compile(&build_oracle(spec, &layout)?.instantiate()?)?;
    let flag = 1u64 << layout.grover_ancilla;
    let messages = 1u64 << spec.hash.message_bits();
    let mut check = OracleCheck {
        kind: spec.hash.kind(),
        digest: spec.target_digest,
        messages,
        flagged: Vec::new(),
        expected: Vec::new(),
        dirty: Vec::new(),
    };
    for m in 0..messages {
        let out = program.run_u64(m);
        if out & flag != 0 {
            check.flagged.push(m);
        }
        if out & !flag != m {
            check.dirty.push(m);
        }
        if spec.hash.digest(m) == spec.target_digest {
            check.expected.push(m);
        }
    }
    Ok(check)
}

/// Inversion about the mean on `message`, up to a global sign.
///
/// The multi-controlled Z on all message qubits is an H-conjugated
/// multi-controlled X onto the last one.
pub fn build_diffusion(width: usize, message: &[usize], work_qubit: usize) -> Result<Circuit> {
    let n = message.len();
    if n < 2 {
        return Err(Error::InvalidParams(format!("diffusion needs at least 2 qubits, got {n}")));
    }
    let mut c = Circuit::new(width);
    c.set_work_qubit(work_qubit)?;
    let last = message[n - 1];
    let layer = |c: &mut Circuit, g: fn(usize) -> Gate| message.iter().try_for_each(|&q| c.push(g(q)));
    layer(&mut c, Gate::h)?;
    layer(&mut c, Gate::x)?;
    c.push(Gate::h(last))?;
    c.push(Gate::controlled_x(message[..n - 1].iter().map(|&q| Control::on(q)).collect(), last))?;
    c.push(Gate::h(last))?;
    layer(&mut c, Gate::x)?;
    layer(&mut c, Gate::h)?;
    Ok(c)
}

/// Oracle followed by diffusion.
pub fn build_grover_step(spec: &OracleSpec, layout: &GroverLayout) -> Result<Circuit> {
    let mut step = build_oracle(spec, layout)?;
    step.mark(DIFFUSION_MARKER);
    step.append(&build_diffusion(layout.width, &layout.message, layout.work_qubit())?)?;
    Ok(step)
}

/// Uniform superposition on the message and `|−⟩` on the Grover ancilla.
pub fn build_initialization(layout: &GroverLayout) -> Circuit {
    let mut c = layout.empty_circuit();
    for &q in &layout.message {
        c.push(Gate::h(q)).expect("layout fits");
    }
    c.push(Gate::x(layout.grover_ancilla)).expect("layout fits");
    c.push(Gate::h(layout.grover_ancilla)).expect("layout fits");
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{count_resources, reversible_run, BasisState, ReversibleProgram};
    use crate::hashes::{chacha_pi, enumerate_preimages, SpongeState, ToyHash};
    use crate::sim::{entanglement_entropy, Bipartition, StateVector};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn write_words(s: &mut BasisState, words: [&[usize]; 4], v: [Word4; 4]) {
        for (q, w) in words.iter().zip(v) {
            s.write(q, w.value() as u64);
        }
    }

    fn read_words(s: &BasisState, map: &RegisterMap) -> [Word4; 4] {
        ["v0", "v1", "v2", "v3"].map(|n| Word4::masked(s.read(map.get(n).unwrap()) as u8))
    }

    #[test]
    fn permutation_matches_classical_on_samples() {
        let layout = GroverLayout::sponge(2);
        let (perm, map) = build_sponge_permutation(&layout, 10, 2, RotationMode::Relabel).unwrap();
        let prog = ReversibleProgram::compile(&perm).unwrap();
        for x in (0..=u16::MAX).step_by(97) {
            let st = SpongeState::from_u16(x);
            let mut s = BasisState::zero(layout.width());
            write_words(&mut s, layout.state_words(), st.v);
            let out = prog.run(&s).unwrap();
            assert_eq!(read_words(&out, &map), chacha_pi(st, 10).v, "input {x:#06x}");
            for &a in layout.adder_ancillas() {
                assert!(!out.get(a));
            }
        }
    }

    #[test]
    fn relabeling_equals_swap_networks() {
        for layout in [GroverLayout::sponge(2), GroverLayout::blake(1)] {
            let build = |mode| match layout.kind() {
                HashKind::Sponge => build_sponge_permutation(&layout, 2, 2, mode),
                HashKind::Blake => build_blake_compression(&layout, 2, 1, mode),
            };
            let (relabel, map) = build(RotationMode::Relabel).unwrap();
            let (swaps, _) = build(RotationMode::Swaps).unwrap();
            assert!(swaps.len() > relabel.len());
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..300 {
                let mut s = BasisState::zero(layout.width());
                for q in 0..32.min(layout.width() - layout.adder_ancillas().len() - 1) {
                    s.set(q, rng.gen());
                }
                let a = reversible_run(&relabel, &s).unwrap();
                let b = reversible_run(&swaps, &s).unwrap();
                // Relabeled words are read through the final map, swapped ones in place.
                for name in layout.words().names() {
                    assert_eq!(a.read(map.get(name).unwrap()), b.read(layout.word(name)), "{name}");
                }
            }
        }
    }

    #[test]
    fn blake_compression_matches_classical() {
        let layout = GroverLayout::blake(2);
        let params = BlakeParams::default();
        let spec = OracleSpec::new(HashSpec::Blake(params), 0);
        let oracle = build_blake_oracle(&spec, &layout).unwrap();
        let half = {
            let mut c = oracle.clone();
            // Keep everything up to and including the digest check.
            let mid = c.marker(MID_MARKER).unwrap();
            let mut h = Circuit::new(c.width());
            for b in c.classical_bits() {
                h.add_classical_bit(b.name.clone(), b.value);
            }
            h.extend(c.gates()[..mid].iter().cloned()).unwrap();
            c = h;
            c
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let prog = ReversibleProgram::compile(&half).unwrap();
        let full = ReversibleProgram::compile(&oracle).unwrap();
        let (_, map) = build_blake_compression(&layout, params.rho, 2, RotationMode::Relabel).unwrap();
        for _ in 0..200 {
            let m: u16 = rng.gen();
            let mut s = BasisState::zero(layout.width());
            s.write(layout.message(), m as u64);
            let out = prog.run(&s).unwrap();
            let digest = (out.read(map.get("v0").unwrap()) << 4) | out.read(map.get("v1").unwrap());
            assert_eq!(digest as u8, params.digest(m as u64));
            assert_eq!(out.get(layout.grover_ancilla()), digest == 0);
            let back = full.run(&s).unwrap();
            let mut expect = s.clone();
            expect.set(layout.grover_ancilla(), params.digest(m as u64) == 0);
            assert_eq!(back, expect);
        }
    }

    #[test]
    fn sponge_oracle_flags_exactly_the_preimages() {
        let layout = GroverLayout::sponge(2);
        for (iv, digest) in [(0u16, 0x00u8), (0x1234, 0x5A), (0xFFFF, 0xC3)] {
            let hash = HashSpec::Sponge(SpongeParams { iv, rounds: 10 });
            let inst = enumerate_preimages(digest, hash).unwrap();
            let prog = ReversibleProgram::compile(&build_sponge_oracle(&OracleSpec::new(hash, digest), &layout).unwrap()).unwrap();
            for m in 0..256u64 {
                let out = prog.run_u64(m);
                assert_eq!(out, m | (inst.is_preimage(m) as u64) << layout.grover_ancilla());
            }
        }
    }

    fn uniform_with_minus(layout: &GroverLayout) -> StateVector {
        let mut s = StateVector::new(layout.width()).unwrap();
        s.apply_circuit(&build_initialization(layout)).unwrap();
        s
    }

    #[test]
    fn sponge_oracle_phase_pattern_and_hygiene() {
        let layout = GroverLayout::sponge(2);
        let hash = HashSpec::Sponge(SpongeParams { iv: 0x0003, rounds: 10 });
        let table = crate::hashes::digest_table(&hash).unwrap();
        let digest = table.iter().position(|p| p.len() >= 2).unwrap() as u8;
        let inst = enumerate_preimages(digest, hash).unwrap();
        let oracle = build_sponge_oracle(&OracleSpec::new(hash, digest), &layout).unwrap();
        let before = uniform_with_minus(&layout);
        let mut after = before.clone();
        after.apply_circuit(&oracle).unwrap();
        for (x, (a, b)) in before.amplitudes().iter().zip(after.amplitudes()).enumerate() {
            let sign = if inst.is_preimage((x & 0xFF) as u64) { -1.0 } else { 1.0 };
            assert!((*b - *a * sign).norm() < 1e-12, "index {x}");
        }
        // Capacity and adder ancillas decoupled.
        let work: Vec<usize> = (8..18).collect();
        let p = Bipartition::new(layout.width(), work).unwrap();
        assert!(entanglement_entropy(&after, &p).unwrap() < 1e-9);
        let mut twice = after.clone();
        twice.apply_circuit(&oracle).unwrap();
        assert!(twice.fidelity(&before).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn diffusion_matrix_is_the_reflection() {
        for n in 2..=4usize {
            let width = n + 1;
            let msg: Vec<usize> = (0..n).collect();
            let d = build_diffusion(width, &msg, n).unwrap();
            let big_n = (1usize << n) as f64;
            let mut sign = 0.0;
            for j in 0..1usize << n {
                let mut s = StateVector::basis(width, j).unwrap();
                s.apply_circuit(&d).unwrap();
                for i in 0..1usize << n {
                    let expect = if i == j { -1.0 + 2.0 / big_n } else { 2.0 / big_n };
                    let got = s.amplitudes()[i];
                    assert!(got.im.abs() < 1e-12);
                    if sign == 0.0 && expect.abs() > 1e-12 {
                        sign = got.re / expect;
                    }
                    assert_abs_diff_eq!(got.re, sign * expect, epsilon = 1e-9);
                }
            }
            assert_abs_diff_eq!(sign.abs(), 1.0, epsilon = 1e-12);
            // D² = I, instantiated form included.
            let inst = d.instantiate().unwrap();
            let mut s = StateVector::basis(width, 1).unwrap();
            s.apply_circuit(&inst).unwrap();
            s.apply_circuit(&inst).unwrap();
            assert!((s.amplitudes()[1] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        }
        assert!(build_diffusion(3, &[0], 1).is_err());
    }

    #[test]
    fn sponge_step_gate_counts() {
        let layout = GroverLayout::sponge(2);
        let spec = OracleSpec::new(HashSpec::Sponge(SpongeParams::default()), 0x5A);
        let step = build_grover_step(&spec, &layout).unwrap();
        let counts = count_resources(&step.instantiate().unwrap()).unwrap();
        assert_eq!(counts.toffoli, 1032);
        assert_eq!(counts.cnot, 3200);
        assert_eq!(counts.width, 19);
        let inv = count_resources(&step.instantiate().unwrap().inverse()).unwrap();
        assert_eq!(inv, counts);
    }

    #[test]
    fn blake_step_gate_counts() {
        let layout = GroverLayout::blake(2);
        let spec = OracleSpec::new(HashSpec::Blake(BlakeParams::default()), 0x5A);
        let counts = count_resources(&build_grover_step(&spec, &layout).unwrap().instantiate().unwrap()).unwrap();
        assert_eq!(counts.toffoli, 2440);
        assert_eq!(counts.cnot, 6912);
        assert_eq!(counts.width, 35);
        assert_eq!(GroverLayout::blake(1).width(), 34);
    }

    #[test]
    fn mismatched_layout_is_rejected() {
        let spec = OracleSpec::new(HashSpec::Blake(BlakeParams::default()), 0);
        assert!(build_oracle(&spec, &GroverLayout::sponge(2)).is_err());
        assert!(OracleSpec::new(HashSpec::Sponge(SpongeParams::default()), 0).with_adder_ancillas(3).is_err());
        let spec = OracleSpec::new(HashSpec::Sponge(SpongeParams::default()), 0);
        assert!(build_oracle(&spec, &GroverLayout::sponge(1)).is_err());
    }

    #[test]
    fn mid_marker_sits_after_digest_check() {
        let layout = GroverLayout::sponge(2);
        let step = build_grover_step(&OracleSpec::new(HashSpec::Sponge(SpongeParams::default()), 7), &layout).unwrap();
        let mid = step.marker(MID_MARKER).unwrap();
        assert_eq!(step.gates()[mid - 1].target, layout.grover_ancilla());
        let inst = step.instantiate().unwrap();
        let mid = inst.marker(MID_MARKER).unwrap();
        assert!(inst.marker(DIFFUSION_MARKER).unwrap() > mid);
        assert_eq!(inst.gates()[mid..].iter().filter(|g| g.target == layout.grover_ancilla()).count(), 0);
    }

    #[test]
    fn reversible_check_of_both_oracles() {
        let c = check_oracle_reversibly(&OracleSpec::new(HashSpec::Sponge(SpongeParams::default()), 0x05)).unwrap();
        assert!(c.passed());
        assert_eq!(c.flagged, vec![7, 92]);
        let c = check_oracle_reversibly(&OracleSpec::new(HashSpec::Blake(BlakeParams::default()), 0x5A)).unwrap();
        assert!(c.passed());
        assert_eq!(c.messages, 1 << 16);
        assert!(!c.flagged.is_empty());
    }
}
