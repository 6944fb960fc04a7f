//! Von Neumann entanglement entropy of a pure state across a bipartition.
//!
//! With the state written as a matrix `ψ[a][b]` (rows indexed by subsystem A,
//! columns by B) the reduced density matrix is `ρ_A = ψ ψ†`. Rows and columns
//! that never share a nonzero entry decouple, so `ρ_A` is block diagonal over
//! the connected components of the bipartite graph of nonzero entries. Each
//! block is diagonalized on whichever side is smaller (`ψ ψ†` and `ψ† ψ` share
//! their nonzero spectrum), which keeps sparse states cheap.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::extract;
use super::StateVector;
use crate::error::{Error, Result};

/// Eigenvalues at or below this are treated as zero.
pub const EIGEN_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    width: usize,
    a: Vec<usize>,
    b: Vec<usize>,
}

impl Bipartition {
    /// `subsystem_a` must be a nonempty proper subset of `0..width`.
    pub fn new(width: usize, subsystem_a: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut a: Vec<usize> = subsystem_a.into_iter().collect();
        a.sort_unstable();
        if let Some(w) = a.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateQubit(w[0]));
        }
        if let Some(&q) = a.iter().find(|&&q| q >= width) {
            return Err(Error::QubitOutOfRange { qubit: q, width });
        }
        if a.is_empty() || a.len() == width {
            return Err(Error::InvalidPartition(format!(
                "subsystem A has {} of {width} qubits; it must be nonempty and proper",
                a.len()
            )));
        }
        let b = (0..width).filter(|q| a.binary_search(q).is_err()).collect();
        Ok(Bipartition { width, a, b })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn subsystem_a(&self) -> &[usize] {
        &self.a
    }

    pub fn subsystem_b(&self) -> &[usize] {
        &self.b
    }

    pub fn complement(&self) -> Bipartition {
        Bipartition { width: self.width, a: self.b.clone(), b: self.a.clone() }
    }
}

/// `S_A = -Tr ρ_A log₂ ρ_A` in bits.
pub fn entanglement_entropy(state: &StateVector, partition: &Bipartition) -> Result<f64> {
    if state.num_qubits() != partition.width {
        return Err(Error::WidthMismatch { expected: partition.width, found: state.num_qubits() });
    }
    let nz = state.amplitudes().iter().enumerate().filter(|(_, a)| a.norm_sqr() != 0.0).map(|(i, a)| (i, *a));
    Ok(entropy_of_entries(nz, partition))
}

/// Entropy from an explicit list of nonzero amplitudes.
pub fn entropy_of_entries(entries: impl IntoIterator<Item = (usize, Complex64)>, partition: &Bipartition) -> f64 {
    // (row id, column id, amplitude) with ids compressed to 0..
    let mut rows: HashMap<usize, usize> = HashMap::new();
    let mut cols: HashMap<usize, usize> = HashMap::new();
    let mut triples = Vec::new();
    for (x, amp) in entries {
        let a = extract(x, &partition.a);
        let b = extract(x, &partition.b);
        let nr = rows.len();
        let r = *rows.entry(a).or_insert(nr);
        let nc = cols.len();
        let c = *cols.entry(b).or_insert(nc);
        triples.push((r, c, amp));
    }
    let (nr, nc) = (rows.len(), cols.len());
    if nr == 0 {
        return 0.0;
    }

    // Union-find over rows 0..nr and columns nr..nr+nc.
    let mut parent: Vec<usize> = (0..nr + nc).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(r, c, _) in &triples {
        let (x, y) = (find(&mut parent, r), find(&mut parent, nr + c));
        if x != y {
            parent[x] = y;
        }
    }
    let mut groups: HashMap<usize, Vec<(usize, usize, Complex64)>> = HashMap::new();
    for &t in &triples {
        let root = find(&mut parent, t.0);
        groups.entry(root).or_default().push(t);
    }

    let mut entropy = 0.0;
    for block in groups.values() {
        for lambda in block_spectrum(block) {
            if lambda > EIGEN_CUTOFF {
                entropy -= lambda * lambda.log2();
            }
        }
    }
    entropy.max(0.0)
}

/// Nonzero spectrum of one connected block of `ψ ψ†`.
fn block_spectrum(block: &[(usize, usize, Complex64)]) -> Vec<f64> {
    let mut row_ids: HashMap<usize, usize> = HashMap::new();
    let mut col_ids: HashMap<usize, usize> = HashMap::new();
    for &(r, c, _) in block {
        let n = row_ids.len();
        row_ids.entry(r).or_insert(n);
        let n = col_ids.len();
        col_ids.entry(c).or_insert(n);
    }
    if row_ids.len() == 1 || col_ids.len() == 1 {
        // Rank one.
        return vec![block.iter().map(|t| t.2.norm_sqr()).sum()];
    }
    // Gram matrix on the smaller side: G[i][j] = Σ_k ψ[i][k] ψ*[j][k].
    let by_rows = row_ids.len() <= col_ids.len();
    let (dim, mut lines) = if by_rows {
        (row_ids.len(), vec![Vec::new(); col_ids.len()])
    } else {
        (col_ids.len(), vec![Vec::new(); row_ids.len()])
    };
    for &(r, c, amp) in block {
        let (i, k) = (row_ids[&r], col_ids[&c]);
        if by_rows {
            lines[k].push((i, amp));
        } else {
            lines[i].push((k, amp.conj()));
        }
    }
    let real = block.iter().all(|t| t.2.im == 0.0);
    if real {
        let mut g = DMatrix::<f64>::zeros(dim, dim);
        for line in &lines {
            for &(i, x) in line {
                for &(j, y) in line {
                    g[(i, j)] += x.re * y.re;
                }
            }
        }
        g.symmetric_eigenvalues().iter().copied().collect()
    } else {
        let mut g = DMatrix::<Complex64>::zeros(dim, dim);
        for line in &lines {
            for &(i, x) in line {
                for &(j, y) in line {
                    g[(i, j)] += x * y.conj();
                }
            }
        }
        g.symmetric_eigenvalues().iter().copied().collect()
    }
}
