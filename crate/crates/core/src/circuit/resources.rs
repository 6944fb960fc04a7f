use serde::{Deserialize, Serialize};

use super::{Circuit, GateKind};
use crate::error::{Error, Result};

/// Gate tallies, ASAP depth and width of an elementary circuit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResourceCount {
    pub toffoli: u64,
    pub cnot: u64,
    pub single: u64,
    pub depth: u64,
    pub width: u64,
}

impl ResourceCount {
    pub fn total(&self) -> u64 {
        self.toffoli + self.cnot + self.single
    }

    /// Gate counts of `times` sequential copies. Depth is multiplied as well,
    /// which is exact when every copy touches a common qubit.
    pub fn repeated(&self, times: u64) -> ResourceCount {
        ResourceCount {
            toffoli: self.toffoli * times,
            cnot: self.cnot * times,
            single: self.single * times,
            depth: self.depth * times,
            width: self.width,
        }
    }
}

/// Counts gates by class and schedules them as soon as possible.
///
/// The circuit must be elementary (see [`Circuit::instantiate`]).
pub fn count_resources(circuit: &Circuit) -> Result<ResourceCount> {
    let mut r = ResourceCount { width: circuit.width() as u64, ..Default::default() };
    let mut ready = vec![0u64; circuit.width()];
    for (index, g) in circuit.gates().iter().enumerate() {
        if g.condition.is_some() {
            return Err(Error::UnresolvedCondition { index });
        }
        if g.has_negative_controls() {
            return Err(Error::InvalidGate(format!(
                "gate {index} has control-on-0 polarity; instantiate the circuit first"
            )));
        }
        match g.kind {
            GateKind::X | GateKind::H | GateKind::Z => r.single += 1,
            GateKind::Cnot => r.cnot += 1,
            GateKind::Toffoli => r.toffoli += 1,
            GateKind::MultiCx => return Err(Error::Undecomposed { index }),
        }
        let layer = g.qubits().map(|q| ready[q]).max().unwrap_or(0) + 1;
        for q in g.qubits() {
            ready[q] = layer;
        }
        r.depth = r.depth.max(layer);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    #[test]
    fn empty_circuit_is_all_zero() {
        let r = count_resources(&Circuit::new(0)).unwrap();
        assert_eq!(r, ResourceCount::default());
    }

    #[test]
    fn disjoint_gates_share_a_layer() {
        let mut c = Circuit::new(3);
        c.push(Gate::cnot(0, 1)).unwrap();
        c.push(Gate::x(2)).unwrap();
        let r = count_resources(&c).unwrap();
        assert_eq!((r.depth, r.cnot, r.single, r.width), (1, 1, 1, 3));
    }

    #[test]
    fn dependent_gates_stack() {
        let mut c = Circuit::new(3);
        c.push(Gate::cnot(0, 1)).unwrap();
        c.push(Gate::toffoli(1, 2, 0)).unwrap();
        c.push(Gate::h(2)).unwrap();
        assert_eq!(count_resources(&c).unwrap().depth, 3);
    }

    #[test]
    fn abstract_gates_are_rejected() {
        let mut c = Circuit::new(5);
        c.push(Gate::controlled_x((0..4).map(crate::circuit::Control::on).collect(), 4)).unwrap();
        assert!(matches!(count_resources(&c), Err(Error::Undecomposed { index: 0 })));
        let mut c = Circuit::new(1);
        let b = c.add_classical_bit("b", true);
        c.push(Gate::x(0).conditioned_on(b)).unwrap();
        assert!(matches!(count_resources(&c), Err(Error::UnresolvedCondition { index: 0 })));
    }
}
