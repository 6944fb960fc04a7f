//! Reversible arithmetic on registers given as qubit slices (bit 0 first).

use super::{Circuit, Direction, Gate};
use crate::error::{Error, Result};

fn check_disjoint(a: &[usize], b: &[usize], what: &str) -> Result<()> {
    if let Some(q) = a.iter().find(|q| b.contains(q)) {
        return Err(Error::Register(format!("{what}: registers overlap on qubit {q}")));
    }
    Ok(())
}

fn check_same_width(a: &[usize], b: &[usize]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::WidthMismatch { expected: a.len(), found: b.len() });
    }
    Ok(())
}

/// `dest ^= source`, one CNOT per bit.
pub fn xor_into(circuit: &mut Circuit, source: &[usize], dest: &[usize]) -> Result<()> {
    check_same_width(source, dest)?;
    check_disjoint(source, dest, "xor")?;
    for (&s, &d) in source.iter().zip(dest) {
        circuit.push(Gate::cnot(s, d))?;
    }
    Ok(())
}

/// `a = (a + b) mod 2^n` with `b` unchanged.
///
/// Ripple-carry adder of the Cuccaro type with the carry-out dropped. The
/// carry chain is threaded through `b`, so a single clean ancilla is enough
/// and it is returned to |0⟩.
///
/// For `n ≥ 2` the adder uses `2(n-1)` Toffolis, `5n-4` CNOTs and `2n-4`
/// X gates.
pub fn add_mod2n(circuit: &mut Circuit, a: &[usize], b: &[usize], ancilla: usize) -> Result<()> {
    check_same_width(a, b)?;
    check_disjoint(a, b, "adder")?;
    if a.contains(&ancilla) || b.contains(&ancilla) {
        return Err(Error::Register(format!("adder ancilla {ancilla} overlaps an operand")));
    }
    let n = a.len();
    match n {
        0 => return Ok(()),
        1 => return circuit.push(Gate::cnot(b[0], a[0])),
        _ => {}
    }
    // Carry into bit i lives on `carry(i)` between the MAJ and UMA sweeps.
    let carry = |i: usize| if i == 0 { ancilla } else { b[i - 1] };

    for i in 0..n - 1 {
        maj(circuit, carry(i), a[i], b[i])?;
    }
    circuit.push(Gate::cnot(b[n - 1], a[n - 1]))?;
    circuit.push(Gate::cnot(b[n - 2], a[n - 1]))?;
    for i in (0..n - 1).rev() {
        if i == 0 {
            uma_short(circuit, carry(i), a[i], b[i])?;
        } else {
            uma_long(circuit, carry(i), a[i], b[i])?;
        }
    }
    Ok(())
}

fn maj(c: &mut Circuit, x: usize, y: usize, z: usize) -> Result<()> {
    c.push(Gate::cnot(z, y))?;
    c.push(Gate::cnot(z, x))?;
    c.push(Gate::toffoli(x, y, z))
}

fn uma_short(c: &mut Circuit, x: usize, y: usize, z: usize) -> Result<()> {
    c.push(Gate::toffoli(x, y, z))?;
    c.push(Gate::cnot(z, x))?;
    c.push(Gate::cnot(x, y))
}

// Same action as `uma_short` at the price of one CNOT and two X gates. Used for
// every bit above 0 so the adder's gate mix lines up with the scaling formulas
// in `estimator`.
fn uma_long(c: &mut Circuit, x: usize, y: usize, z: usize) -> Result<()> {
    c.push(Gate::x(y))?;
    c.push(Gate::cnot(x, y))?;
    c.push(Gate::toffoli(x, y, z))?;
    c.push(Gate::x(y))?;
    c.push(Gate::cnot(z, x))?;
    c.push(Gate::cnot(z, y))
}

/// Swap of two qubits as three CNOTs.
pub fn swap(circuit: &mut Circuit, p: usize, q: usize) -> Result<()> {
    circuit.push(Gate::cnot(p, q))?;
    circuit.push(Gate::cnot(q, p))?;
    circuit.push(Gate::cnot(p, q))
}

/// Rotates the value held in `register` by physically moving qubit contents
/// with SWAPs, leaving the labels untouched. This is the gate-based
/// counterpart of relabeling and exists for cross-checking it.
pub fn rotate_with_swaps(
    circuit: &mut Circuit,
    register: &[usize],
    amount: usize,
    direction: Direction,
) -> Result<()> {
    let n = register.len();
    if n == 0 {
        return Ok(());
    }
    let r = match direction {
        Direction::Left => amount % n,
        Direction::Right => (n - amount % n) % n,
    };
    // Left rotation by one: bit n-1 moves to bit 0, everything else moves up.
    for _ in 0..r {
        for i in (1..n).rev() {
            swap(circuit, register[i], register[i - 1])?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{reversible_run, BasisState};

    fn run(c: &Circuit, input: u128) -> u128 {
        reversible_run(c, &BasisState::from_u128(c.width(), input)).unwrap().to_u128()
    }

    fn field(x: u128, qubits: &[usize]) -> u128 {
        qubits.iter().enumerate().map(|(i, &q)| ((x >> q) & 1) << i).sum()
    }

    fn place(v: u128, qubits: &[usize]) -> u128 {
        qubits.iter().enumerate().map(|(i, &q)| ((v >> i) & 1) << q).sum()
    }

    #[test]
    fn xor_truth() {
        let (a, b) = ([0, 1, 2, 3], [4, 5, 6, 7]);
        let mut c = Circuit::new(8);
        xor_into(&mut c, &a, &b).unwrap();
        let out = run(&c, place(0b1010, &a) | place(0b0110, &b));
        assert_eq!(field(out, &b), 0b1100);
        assert_eq!(field(out, &a), 0b1010);
    }

    #[test]
    fn xor_rejects_overlap() {
        let mut c = Circuit::new(4);
        assert!(xor_into(&mut c, &[0, 1], &[1, 2]).is_err());
    }

    #[test]
    fn adder_small_cases() {
        let (a, b, anc) = ([0, 1, 2, 3], [4, 5, 6, 7], 8);
        let mut c = Circuit::new(9);
        add_mod2n(&mut c, &a, &b, anc).unwrap();
        for (x, y, sum) in [(3u128, 5u128, 8u128), (15, 1, 0)] {
            let out = run(&c, place(x, &a) | place(y, &b));
            assert_eq!(field(out, &a), sum);
            assert_eq!(field(out, &b), y);
            assert_eq!((out >> anc) & 1, 0);
        }
    }

    #[test]
    fn adder_exhaustive_for_each_width() {
        for n in 1..=5usize {
            let a: Vec<usize> = (0..n).collect();
            let b: Vec<usize> = (n..2 * n).collect();
            let anc = 2 * n;
            let mut c = Circuit::new(2 * n + 1);
            add_mod2n(&mut c, &a, &b, anc).unwrap();
            let m = 1u128 << n;
            for x in 0..m {
                for y in 0..m {
                    let out = run(&c, place(x, &a) | place(y, &b));
                    assert_eq!(out, place((x + y) % m, &a) | place(y, &b), "n={n} x={x} y={y}");
                }
            }
        }
    }

    #[test]
    fn adder_gate_mix() {
        for n in 2..=8u64 {
            let w = n as usize;
            let a: Vec<usize> = (0..w).collect();
            let b: Vec<usize> = (w..2 * w).collect();
            let mut c = Circuit::new(2 * w + 1);
            add_mod2n(&mut c, &a, &b, 2 * w).unwrap();
            let r = crate::circuit::count_resources(&c).unwrap();
            assert_eq!(r.toffoli, 2 * (n - 1));
            assert_eq!(r.cnot, 5 * n - 4);
            assert_eq!(r.single, 2 * n - 4);
        }
    }

    #[test]
    fn swap_rotation_matches_value_rotation() {
        let reg = [0, 1, 2, 3];
        for amount in 0..5 {
            for (dir, expect) in [
                (Direction::Left, (|v, r| ((v << r) | (v >> (4 - r))) & 15) as fn(u128, u32) -> u128),
                (Direction::Right, |v: u128, r: u32| ((v >> r) | (v << (4 - r))) & 15),
            ] {
                let mut c = Circuit::new(4);
                rotate_with_swaps(&mut c, &reg, amount, dir).unwrap();
                for v in 0..16 {
                    assert_eq!(run(&c, v), expect(v, (amount % 4) as u32) & 15);
                }
            }
        }
    }
}
