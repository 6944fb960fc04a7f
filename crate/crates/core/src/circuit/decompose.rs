//! Multi-controlled X decomposition into Toffoli gates.

use super::{Gate, GateKind};
use crate::error::{Error, Result};

/// MCX with `controls.len() = m` positive controls using `m - 2` borrowed
/// qubits whose values are arbitrary and restored on exit.
///
/// Produces `4(m - 2)` Toffolis for `m ≥ 3`; `m ≤ 2` maps to a single X, CNOT
/// or Toffoli.
pub fn mcx_with_dirty_ancillas(controls: &[usize], target: usize, ancillas: &[usize]) -> Result<Vec<Gate>> {
    let m = controls.len();
    let tof = Gate::toffoli;
    match m {
        0 => return Ok(vec![Gate::x(target)]),
        1 => return Ok(vec![Gate::cnot(controls[0], target)]),
        2 => return Ok(vec![tof(controls[0], controls[1], target)]),
        _ => {}
    }
    if ancillas.len() < m - 2 {
        return Err(Error::InvalidParams(format!(
            "{m}-controlled X needs {} borrowed qubits, got {}",
            m - 2,
            ancillas.len()
        )));
    }
    let (c, a) = (controls, &ancillas[..m - 2]);
    let mut ladder = Vec::with_capacity(2 * m - 5);
    for i in (1..m - 2).rev() {
        ladder.push(tof(c[i + 1], a[i - 1], a[i]));
    }
    ladder.push(tof(c[0], c[1], a[0]));
    for i in 1..m - 2 {
        ladder.push(tof(c[i + 1], a[i - 1], a[i]));
    }
    let top = tof(c[m - 1], a[m - 3], target);

    let mut out = Vec::with_capacity(4 * (m - 2));
    out.push(top.clone());
    out.extend(ladder.iter().cloned());
    out.push(top);
    out.extend(ladder);
    Ok(out)
}

/// Lowers an MCX gate to Toffolis with one borrowed work qubit that may hold
/// any value and is restored.
///
/// The controls are split in halves `c1`, `c2`; with `w` the work qubit the
/// sequence is `MCX(c2 + w → t)`, `MCX(c1 → w)`, repeated twice. Each half
/// borrows the qubits of the other half as its own scratch. For `k ≥ 5`
/// controls this costs `8k - 24` Toffolis.
///
/// Non-MCX gates are returned unchanged.
pub fn decompose_multi_cx(gate: &Gate, work_qubit: usize) -> Result<Vec<Gate>> {
    if gate.kind != GateKind::MultiCx {
        return Ok(vec![gate.clone()]);
    }
    if gate.qubits().any(|q| q == work_qubit) {
        return Err(Error::DuplicateQubit(work_qubit));
    }
    if gate.has_negative_controls() {
        return Err(Error::InvalidGate("lower control-on-0 polarity before decomposing".into()));
    }
    if gate.condition.is_some() {
        return Err(Error::InvalidGate("resolve the classical condition before decomposing".into()));
    }
    let controls: Vec<usize> = gate.controls.iter().map(|c| c.qubit).collect();
    let k = controls.len();
    let (c1, c2) = controls.split_at(k.div_ceil(2));

    let mut c2w = c2.to_vec();
    c2w.push(work_qubit);
    let mut spare1 = c2.to_vec();
    spare1.push(gate.target);

    let g1 = mcx_with_dirty_ancillas(c1, work_qubit, &spare1)?;
    let g2 = mcx_with_dirty_ancillas(&c2w, gate.target, c1)?;
    let mut out = Vec::with_capacity(2 * (g1.len() + g2.len()));
    for _ in 0..2 {
        out.extend(g2.iter().cloned());
        out.extend(g1.iter().cloned());
    }
    Ok(out)
}

/// Reference MCX used by tests: `controls` all positive.
#[cfg(test)]
pub(crate) fn native_mcx(controls: &[usize], target: usize) -> Gate {
    Gate::controlled_x(
        controls.iter().map(|&q| super::Control::on(q)).collect(),
        target,
    )
}
