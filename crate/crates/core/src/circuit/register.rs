use crate::error::{Error, Result};

/// Rotation direction for [`rotate_register`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

/// Named registers over physical qubits.
///
/// Bit `i` of a register is its `i`-th least significant bit. No physical qubit
/// may belong to two registers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegisterMap {
    registers: Vec<(String, Vec<usize>)>,
}

impl RegisterMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, qubits: Vec<usize>) -> Result<()> {
        let name = name.into();
        if self.registers.iter().any(|(n, _)| *n == name) {
            return Err(Error::Register(format!("register `{name}` already defined")));
        }
        for (i, &q) in qubits.iter().enumerate() {
            if qubits[..i].contains(&q) || self.physical_qubits().any(|p| p == q) {
                return Err(Error::Register(format!("qubit {q} is already mapped")));
            }
        }
        self.registers.push((name, qubits));
        Ok(())
    }

    /// Builder-style [`RegisterMap::add`].
    pub fn with(mut self, name: impl Into<String>, qubits: Vec<usize>) -> Result<Self> {
        self.add(name, qubits)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Result<&[usize]> {
        self.registers
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, q)| q.as_slice())
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn qubit(&self, name: &str, bit: usize) -> Result<usize> {
        let reg = self.get(name)?;
        reg.get(bit).copied().ok_or_else(|| {
            Error::Register(format!("bit {bit} out of range for `{name}` of width {}", reg.len()))
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.registers.iter().map(|(n, _)| n.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[usize])> {
        self.registers.iter().map(|(n, q)| (n.as_str(), q.as_slice()))
    }

    pub fn physical_qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.registers.iter().flat_map(|(_, q)| q.iter().copied())
    }

    fn get_mut(&mut self, name: &str) -> Result<&mut Vec<usize>> {
        self.registers
            .iter_mut()
            .find(|(n, _)| n == name)
            .map(|(_, q)| q)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    /// In-place form of [`rotate_register`].
    pub fn rotate(&mut self, name: &str, amount: usize, direction: Direction) -> Result<()> {
        let reg = self.get_mut(name)?;
        if reg.is_empty() {
            return Err(Error::Register(format!("register `{name}` is empty")));
        }
        let r = amount % reg.len();
        // Left rotation by r moves logical bit i to i + r, so the new bit i is
        // read from the qubit that used to hold bit i - r.
        match direction {
            Direction::Left => reg.rotate_right(r),
            Direction::Right => reg.rotate_left(r),
        }
        Ok(())
    }
}

/// Relabels `register` so that its logical value is rotated by `amount`.
/// No gates are involved.
pub fn rotate_register(
    map: &RegisterMap,
    register: &str,
    amount: usize,
    direction: Direction,
) -> Result<RegisterMap> {
    let mut out = map.clone();
    out.rotate(register, amount, direction)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four() -> RegisterMap {
        RegisterMap::new().with("v", vec![0, 1, 2, 3]).unwrap()
    }

    #[test]
    fn left_rotation_by_two() {
        let m = rotate_register(&four(), "v", 2, Direction::Left).unwrap();
        assert_eq!(m.get("v").unwrap(), &[2, 3, 0, 1]);
    }

    #[test]
    fn left_one_then_right_one_is_identity() {
        let m = rotate_register(&four(), "v", 1, Direction::Left).unwrap();
        assert_eq!(m.get("v").unwrap(), &[3, 0, 1, 2]);
        let m = rotate_register(&m, "v", 1, Direction::Right).unwrap();
        assert_eq!(m, four());
    }

    #[test]
    fn zero_and_full_period_are_identity() {
        assert_eq!(rotate_register(&four(), "v", 0, Direction::Left).unwrap(), four());
        let twice = rotate_register(&four(), "v", 2, Direction::Left).unwrap();
        let twice = rotate_register(&twice, "v", 2, Direction::Left).unwrap();
        assert_eq!(twice, four());
    }

    #[test]
    fn unknown_register_and_overlap_are_errors() {
        assert!(matches!(
            rotate_register(&four(), "w", 1, Direction::Left),
            Err(Error::UnknownRegister(_))
        ));
        assert!(four().with("w", vec![3, 4]).is_err());
        assert!(four().with("v", vec![7]).is_err());
    }
}
