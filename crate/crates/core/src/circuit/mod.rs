//! Circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered list of [`Gate`] records over physical qubit
//! indices, together with a [`RegisterMap`] that names groups of qubits and a
//! small classical register whose bits can switch gates on or off.
//!
//! Circuits come in two flavours. *Abstract* circuits, as produced by the
//! oracle builders, may contain classically conditioned gates, control-on-0
//! polarities and native multi-controlled X gates. [`Circuit::instantiate`]
//! lowers them to *elementary* circuits made of X, H, Z, CNOT and Toffoli
//! gates only, which is the form that resource counting operates on.

mod arith;
mod decompose;
mod register;
mod resources;
mod reversible;
mod text;

pub use arith::{add_mod2n, rotate_with_swaps, swap, xor_into};
pub use decompose::{decompose_multi_cx, mcx_with_dirty_ancillas};
pub use register::{rotate_register, Direction, RegisterMap};
pub use resources::{count_resources, ResourceCount};
pub use reversible::{reversible_run, BasisState, ReversibleProgram};
pub use text::{parse_circuit, serialize_circuit};

use crate::error::{Error, Result};

/// Elementary and composite gate kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    X,
    H,
    Z,
    Cnot,
    Toffoli,
    MultiCx,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::Z => "Z",
            GateKind::Cnot => "CNOT",
            GateKind::Toffoli => "TOFFOLI",
            GateKind::MultiCx => "MCX",
        }
    }

    /// Number of controls the kind requires; `None` means "three or more".
    fn control_arity(self) -> Option<usize> {
        match self {
            GateKind::X | GateKind::H | GateKind::Z => Some(0),
            GateKind::Cnot => Some(1),
            GateKind::Toffoli => Some(2),
            GateKind::MultiCx => None,
        }
    }

    /// True for gates that map computational basis states to basis states.
    pub fn is_classical(self) -> bool {
        !matches!(self, GateKind::H | GateKind::Z)
    }
}

/// Which control value activates a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// Active when the control qubit is |1⟩ (filled dot).
    One,
    /// Active when the control qubit is |0⟩ (hollow dot).
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn on(qubit: usize) -> Self {
        Control { qubit, polarity: Polarity::One }
    }

    pub fn off(qubit: usize) -> Self {
        Control { qubit, polarity: Polarity::Zero }
    }

    /// Control that fires when the qubit holds `bit`.
    pub fn matching(qubit: usize, bit: bool) -> Self {
        if bit {
            Self::on(qubit)
        } else {
            Self::off(qubit)
        }
    }
}

/// Index into a circuit's classical register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassicalBitId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalBit {
    pub name: String,
    pub value: bool,
}

/// A single gate record.
///
/// The gate is plain data; index validity is checked when it is pushed onto a
/// [`Circuit`] or applied to a state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub controls: Vec<Control>,
    pub target: usize,
    /// The gate only exists in the instantiated circuit when this classical
    /// bit is set.
    pub condition: Option<ClassicalBitId>,
}

impl Gate {
    fn plain(kind: GateKind, controls: Vec<Control>, target: usize) -> Self {
        Gate { kind, controls, target, condition: None }
    }

    pub fn x(target: usize) -> Self {
        Self::plain(GateKind::X, Vec::new(), target)
    }

    pub fn h(target: usize) -> Self {
        Self::plain(GateKind::H, Vec::new(), target)
    }

    pub fn z(target: usize) -> Self {
        Self::plain(GateKind::Z, Vec::new(), target)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::plain(GateKind::Cnot, vec![Control::on(control)], target)
    }

    pub fn toffoli(c0: usize, c1: usize, target: usize) -> Self {
        Self::plain(GateKind::Toffoli, vec![Control::on(c0), Control::on(c1)], target)
    }

    /// Controlled X with any number of controls; the kind is chosen from the
    /// control count (0 → X, 1 → CNOT, 2 → TOFFOLI, more → MCX).
    pub fn controlled_x(controls: Vec<Control>, target: usize) -> Self {
        let kind = match controls.len() {
            0 => GateKind::X,
            1 => GateKind::Cnot,
            2 => GateKind::Toffoli,
            _ => GateKind::MultiCx,
        };
        Self::plain(kind, controls, target)
    }

    pub fn conditioned_on(mut self, bit: ClassicalBitId) -> Self {
        self.condition = Some(bit);
        self
    }

    /// All qubits the gate acts on, controls first.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().map(|c| c.qubit).chain(std::iter::once(self.target))
    }

    pub fn has_negative_controls(&self) -> bool {
        self.controls.iter().any(|c| c.polarity == Polarity::Zero)
    }

    /// Checks arity, index range and distinctness.
    pub fn validate(&self, width: usize) -> Result<()> {
        if let Some(arity) = self.kind.control_arity() {
            if self.controls.len() != arity {
                return Err(Error::InvalidGate(format!(
                    "{} expects {} control(s), got {}",
                    self.kind.name(),
                    arity,
                    self.controls.len()
                )));
            }
        } else if self.controls.len() < 3 {
            return Err(Error::InvalidGate(format!(
                "MCX needs at least 3 controls, got {}",
                self.controls.len()
            )));
        }
        let mut seen = 0u128;
        let mut seen_wide = Vec::new();
        for q in self.qubits() {
            if q >= width {
                return Err(Error::QubitOutOfRange { qubit: q, width });
            }
            if q < 128 {
                if seen & (1u128 << q) != 0 {
                    return Err(Error::DuplicateQubit(q));
                }
                seen |= 1u128 << q;
            } else {
                if seen_wide.contains(&q) {
                    return Err(Error::DuplicateQubit(q));
                }
                seen_wide.push(q);
            }
        }
        Ok(())
    }
}

/// Named position inside a circuit's gate list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marker {
    pub name: String,
    /// Number of gates that precede the marker.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    registers: RegisterMap,
    classical: Vec<ClassicalBit>,
    markers: Vec<Marker>,
    work_qubit: Option<usize>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit {
            width,
            gates: Vec::new(),
            registers: RegisterMap::default(),
            classical: Vec::new(),
            markers: Vec::new(),
            work_qubit: None,
        }
    }

    pub fn with_registers(width: usize, registers: RegisterMap) -> Result<Self> {
        if let Some(q) = registers.physical_qubits().find(|&q| q >= width) {
            return Err(Error::QubitOutOfRange { qubit: q, width });
        }
        let mut c = Self::new(width);
        c.registers = registers;
        Ok(c)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn registers(&self) -> &RegisterMap {
        &self.registers
    }

    pub fn registers_mut(&mut self) -> &mut RegisterMap {
        &mut self.registers
    }

    pub fn classical_bits(&self) -> &[ClassicalBit] {
        &self.classical
    }

    pub fn markers(&self) -> &[Marker] {
        &self.markers
    }

    pub fn marker(&self, name: &str) -> Option<usize> {
        self.markers.iter().find(|m| m.name == name).map(|m| m.position)
    }

    /// Qubit borrowed as the work qubit when multi-controlled gates are
    /// decomposed.
    pub fn work_qubit(&self) -> Option<usize> {
        self.work_qubit
    }

    pub fn set_work_qubit(&mut self, qubit: usize) -> Result<()> {
        if qubit >= self.width {
            return Err(Error::QubitOutOfRange { qubit, width: self.width });
        }
        self.work_qubit = Some(qubit);
        Ok(())
    }

    pub fn add_classical_bit(&mut self, name: impl Into<String>, value: bool) -> ClassicalBitId {
        self.classical.push(ClassicalBit { name: name.into(), value });
        ClassicalBitId(self.classical.len() - 1)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        if let Some(ClassicalBitId(id)) = gate.condition {
            if id >= self.classical.len() {
                return Err(Error::InvalidGate(format!("classical bit {id} does not exist")));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Records a marker at the current end of the gate list.
    pub fn mark(&mut self, name: impl Into<String>) {
        let position = self.gates.len();
        self.markers.push(Marker { name: name.into(), position });
    }

    /// Appends every gate of `other`, remapping its classical bits and
    /// shifting its markers. The register map of `self` is kept.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.width != self.width {
            return Err(Error::WidthMismatch { expected: self.width, found: other.width });
        }
        let offset = self.classical.len();
        self.classical.extend(other.classical.iter().cloned());
        let base = self.gates.len();
        for g in &other.gates {
            let mut g = g.clone();
            if let Some(ClassicalBitId(id)) = g.condition {
                g.condition = Some(ClassicalBitId(id + offset));
            }
            self.gates.push(g);
        }
        self.markers.extend(other.markers.iter().map(|m| Marker {
            name: m.name.clone(),
            position: m.position + base,
        }));
        if self.work_qubit.is_none() {
            self.work_qubit = other.work_qubit;
        }
        Ok(())
    }

    /// Formal inverse. Every gate kind used here is self-inverse, so the
    /// inverse is the reversed gate list. Markers are dropped.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().cloned().collect(),
            registers: self.registers.clone(),
            classical: self.classical.clone(),
            markers: Vec::new(),
            work_qubit: self.work_qubit,
        }
    }

    /// True when no gate carries a condition, a negative control or a native
    /// multi-controlled X.
    pub fn is_elementary(&self) -> bool {
        self.gates.iter().all(|g| {
            g.condition.is_none() && !g.has_negative_controls() && g.kind != GateKind::MultiCx
        })
    }

    /// Resolves classical conditions without touching anything else: gates
    /// whose bit is 0 are dropped, the rest become unconditional.
    pub fn resolve_conditions(&self) -> Circuit {
        self.lower(false, false).expect("condition resolution cannot fail")
    }

    /// Lowers the circuit to elementary gates: classical conditions resolved,
    /// control-on-0 polarities rewritten as X conjugations and multi-controlled
    /// X gates decomposed into Toffolis borrowing the circuit's work qubit.
    pub fn instantiate(&self) -> Result<Circuit> {
        self.lower(true, true)
    }

    fn lower(&self, polarities: bool, decompose: bool) -> Result<Circuit> {
        let mut out = Circuit {
            width: self.width,
            gates: Vec::with_capacity(self.gates.len()),
            registers: self.registers.clone(),
            classical: Vec::new(),
            markers: Vec::new(),
            work_qubit: self.work_qubit,
        };
        let mut markers = self.markers.iter().peekable();
        for (i, gate) in self.gates.iter().enumerate() {
            while let Some(m) = markers.next_if(|m| m.position == i) {
                out.mark(m.name.clone());
            }
            if let Some(ClassicalBitId(id)) = gate.condition {
                if !self.classical[id].value {
                    continue;
                }
            }
            let mut gate = gate.clone();
            gate.condition = None;
            let flips: Vec<usize> = if polarities {
                gate.controls
                    .iter_mut()
                    .filter(|c| c.polarity == Polarity::Zero)
                    .map(|c| {
                        c.polarity = Polarity::One;
                        c.qubit
                    })
                    .collect()
            } else {
                Vec::new()
            };
            for &q in &flips {
                out.gates.push(Gate::x(q));
            }
            if decompose && gate.kind == GateKind::MultiCx {
                let work = self.work_qubit.ok_or_else(|| {
                    Error::InvalidParams("circuit has no work qubit for MCX decomposition".into())
                })?;
                out.gates.extend(decompose_multi_cx(&gate, work)?);
            } else {
                out.gates.push(gate);
            }
            for &q in flips.iter().rev() {
                out.gates.push(Gate::x(q));
            }
        }
        for m in markers {
            out.mark(m.name.clone());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_rejects_bad_indices() {
        let mut c = Circuit::new(3);
        assert!(matches!(c.push(Gate::x(3)), Err(Error::QubitOutOfRange { qubit: 3, .. })));
        assert!(matches!(c.push(Gate::cnot(1, 1)), Err(Error::DuplicateQubit(1))));
        let bad = Gate { kind: GateKind::MultiCx, controls: vec![Control::on(0)], target: 1, condition: None };
        assert!(matches!(c.push(bad), Err(Error::InvalidGate(_))));
    }

    #[test]
    fn controlled_x_picks_kind_from_arity() {
        assert_eq!(Gate::controlled_x(vec![], 0).kind, GateKind::X);
        assert_eq!(Gate::controlled_x(vec![Control::on(1)], 0).kind, GateKind::Cnot);
        assert_eq!(Gate::controlled_x(vec![Control::on(1), Control::on(2)], 0).kind, GateKind::Toffoli);
        let c3 = (1..4).map(Control::on).collect();
        assert_eq!(Gate::controlled_x(c3, 0).kind, GateKind::MultiCx);
    }

    #[test]
    fn instantiate_drops_unset_conditions_and_lowers_polarity() {
        let mut c = Circuit::new(3);
        let on = c.add_classical_bit("c0", true);
        let off = c.add_classical_bit("c1", false);
        c.push(Gate::x(0).conditioned_on(on)).unwrap();
        c.push(Gate::x(1).conditioned_on(off)).unwrap();
        c.mark("mid");
        c.push(Gate::controlled_x(vec![Control::off(0), Control::on(1)], 2)).unwrap();
        let inst = c.instantiate().unwrap();
        assert_eq!(
            inst.gates(),
            &[Gate::x(0), Gate::x(0), Gate::toffoli(0, 1, 2), Gate::x(0)]
        );
        assert_eq!(inst.marker("mid"), Some(1));
        assert!(inst.is_elementary());
    }

    #[test]
    fn inverse_reverses_order() {
        let mut c = Circuit::new(2);
        c.push(Gate::h(0)).unwrap();
        c.push(Gate::cnot(0, 1)).unwrap();
        assert_eq!(c.inverse().gates(), &[Gate::cnot(0, 1), Gate::h(0)]);
    }

    #[test]
    fn append_shifts_markers_and_classical_bits() {
        let mut a = Circuit::new(2);
        a.add_classical_bit("a", false);
        a.push(Gate::x(0)).unwrap();
        let mut b = Circuit::new(2);
        let bit = b.add_classical_bit("b", true);
        b.mark("start");
        b.push(Gate::x(1).conditioned_on(bit)).unwrap();
        a.append(&b).unwrap();
        assert_eq!(a.marker("start"), Some(1));
        assert_eq!(a.gates()[1].condition, Some(ClassicalBitId(1)));
        assert_eq!(a.instantiate().unwrap().len(), 2);
    }
}
