//! Line-oriented circuit text format.
//!
//! ```text
//! # comment
//! width 5
//! work 4
//! cbit iv0 1
//! reg m 0 1 2
//! X 0 if 0
//! CNOT +0 1
//! mark mid
//! MCX +0 -1 +2 3
//! ```
//!
//! Header lines declare the width, the work qubit, classical bits (in index
//! order) and registers. Every other line is a marker or one gate: the kind,
//! the controls tagged `+` (on 1) or `-` (on 0), the target, and optionally
//! `if <classical bit index>`.

use std::fmt::Write as _;

use super::{Circuit, ClassicalBitId, Control, Gate, GateKind};
use crate::error::{Error, Result};

pub fn serialize_circuit(circuit: &Circuit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "width {}", circuit.width());
    if let Some(w) = circuit.work_qubit() {
        let _ = writeln!(out, "work {w}");
    }
    for b in circuit.classical_bits() {
        let _ = writeln!(out, "cbit {} {}", b.name, b.value as u8);
    }
    for (name, qubits) in circuit.registers().iter() {
        let _ = write!(out, "reg {name}");
        for q in qubits {
            let _ = write!(out, " {q}");
        }
        out.push('\n');
    }
    let mut markers = circuit.markers().iter().peekable();
    for (i, g) in circuit.gates().iter().enumerate() {
        while let Some(m) = markers.next_if(|m| m.position == i) {
            let _ = writeln!(out, "mark {}", m.name);
        }
        out.push_str(g.kind.name());
        for c in &g.controls {
            let sign = match c.polarity {
                super::Polarity::One => '+',
                super::Polarity::Zero => '-',
            };
            let _ = write!(out, " {sign}{}", c.qubit);
        }
        let _ = write!(out, " {}", g.target);
        if let Some(ClassicalBitId(b)) = g.condition {
            let _ = write!(out, " if {b}");
        }
        out.push('\n');
    }
    for m in markers {
        let _ = writeln!(out, "mark {}", m.name);
    }
    out
}

fn kind_from_name(s: &str) -> Option<GateKind> {
    Some(match s {
        "X" => GateKind::X,
        "H" => GateKind::H,
        "Z" => GateKind::Z,
        "CNOT" => GateKind::Cnot,
        "TOFFOLI" => GateKind::Toffoli,
        "MCX" => GateKind::MultiCx,
        _ => return None,
    })
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| Error::Parse { line: line_no, message };
        let num = |tok: &str| tok.parse::<usize>().map_err(|_| err(format!("expected an integer, got `{tok}`")));

        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "width" {
            if circuit.is_some() || toks.len() != 2 {
                return Err(err("`width` must appear once, first, with one argument".into()));
            }
            circuit = Some(Circuit::new(num(toks[1])?));
            continue;
        }
        let c = circuit.as_mut().ok_or_else(|| err("missing `width` header".into()))?;
        match toks[0] {
            "work" if toks.len() == 2 => c.set_work_qubit(num(toks[1])?)?,
            "cbit" if toks.len() == 3 => {
                let value = match toks[2] {
                    "0" => false,
                    "1" => true,
                    other => return Err(err(format!("classical bit value must be 0 or 1, got `{other}`"))),
                };
                c.add_classical_bit(toks[1], value);
            }
            "reg" if toks.len() >= 2 => {
                let qubits = toks[2..].iter().map(|t| num(t)).collect::<Result<Vec<_>>>()?;
                if let Some(&q) = qubits.iter().find(|&&q| q >= c.width()) {
                    return Err(Error::QubitOutOfRange { qubit: q, width: c.width() });
                }
                c.registers_mut().add(toks[1], qubits)?;
            }
            "mark" if toks.len() == 2 => c.mark(toks[1]),
            head => {
                let kind = kind_from_name(head).ok_or_else(|| err(format!("unknown directive `{head}`")))?;
                let (body, condition) = match toks.iter().position(|&t| t == "if") {
                    Some(p) if p + 2 == toks.len() => (&toks[1..p], Some(ClassicalBitId(num(toks[p + 1])?))),
                    Some(_) => return Err(err("`if` takes exactly one classical bit index".into())),
                    None => (&toks[1..], None),
                };
                let (target, controls) =
                    body.split_last().ok_or_else(|| err(format!("{head} needs a target")))?;
                let controls = controls
                    .iter()
                    .map(|t| match t.split_at(1) {
                        ("+", q) => Ok(Control::on(num(q)?)),
                        ("-", q) => Ok(Control::off(num(q)?)),
                        _ => Err(err(format!("control `{t}` must start with + or -"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let gate = Gate { kind, controls, target: num(target)?, condition };
                c.push(gate).map_err(|e| err(e.to_string()))?;
            }
        }
    }
    circuit.ok_or(Error::Parse { line: 0, message: "empty circuit description".into() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut c = Circuit::new(5);
        c.registers_mut().add("m", vec![0, 1, 2]).unwrap();
        c.set_work_qubit(4).unwrap();
        let b = c.add_classical_bit("iv0", true);
        c.push(Gate::x(0).conditioned_on(b)).unwrap();
        c.push(Gate::cnot(0, 1)).unwrap();
        c.mark("mid");
        c.push(Gate::controlled_x(vec![Control::on(0), Control::off(1), Control::on(2)], 3)).unwrap();
        c.push(Gate::h(2)).unwrap();
        c.mark("end");
        let text = serialize_circuit(&c);
        assert!(text.contains("MCX +0 -1 +2 3\n"));
        assert!(text.contains("X 0 if 0\n"));
        assert_eq!(parse_circuit(&text).unwrap(), c);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_circuit("width 2\nCNOT +0 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_circuit("X 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_circuit("width 2\nFOO 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_circuit("width 2\nCNOT 0 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }
}
