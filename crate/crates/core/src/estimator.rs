//! Closed-form resource scaling of one Grover step, extrapolation to the
//! full-size hashes, and reconciliation with counts measured on built
//! circuits.
//!
//! Formulas are evaluated in exact rational arithmetic and must land on
//! integers.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::circuit::{count_resources, ResourceCount};
use crate::error::{Error, Result};
use crate::hashes::{BlakeParams, HashKind, HashSpec, SpongeParams};
use crate::oracles::{build_grover_step, GroverLayout, OracleSpec};

type Q = Ratio<i64>;

/// `n` state bits on `s` sites (a perfect square dividing `n`), `rho`
/// compression rounds for blake.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScalingParams {
    pub n: u64,
    pub s: u64,
    pub rho: u64,
}

impl ScalingParams {
    pub fn new(n: u64, s: u64, rho: u64) -> Result<Self> {
        let p = ScalingParams { n, s, rho };
        p.sqrt_s()?;
        if n == 0 || !n.is_multiple_of(s) {
            return Err(Error::InvalidParams(format!("n = {n} must be a positive multiple of s = {s}")));
        }
        Ok(p)
    }

    pub const TOY_SPONGE: ScalingParams = ScalingParams { n: 16, s: 4, rho: 0 };
    pub const REAL_SPONGE: ScalingParams = ScalingParams { n: 512, s: 16, rho: 0 };
    pub const TOY_BLAKE: ScalingParams = ScalingParams { n: 16, s: 4, rho: 12 };
    pub const REAL_BLAKE: ScalingParams = ScalingParams { n: 1024, s: 16, rho: 12 };

    fn sqrt_s(&self) -> Result<u64> {
        let r = (self.s as f64).sqrt().round() as u64;
        if self.s == 0 || r * r != self.s {
            return Err(Error::InvalidParams(format!("s = {} is not a positive perfect square", self.s)));
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Formula,
    Measured,
    Published,
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Source::Formula => "formula",
            Source::Measured => "measured",
            Source::Published => "published",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Estimate {
    pub kind: HashKind,
    pub params: ScalingParams,
    pub counts: ResourceCount,
    pub qubits: u64,
    pub source: Source,
}

fn int(q: Q, what: &str) -> Result<u64> {
    if !q.is_integer() || q < Q::from_integer(0) {
        return Err(Error::InvalidParams(format!("{what} evaluates to {q}, not a nonnegative integer")));
    }
    Ok(q.to_integer() as u64)
}

fn q(x: u64) -> Q {
    Q::from_integer(x as i64)
}

/// Toffoli `88n−80s−88`, CNOT `240n−160s`, single `84n−160s+2`, depth
/// `(120/√s+8)n−120√s−80`.
pub fn sponge_gate_formulas(p: ScalingParams) -> Result<Estimate> {
    let r = q(p.sqrt_s()?);
    let (n, s) = (q(p.n), q(p.s));
    let c = Q::from_integer;
    let counts = ResourceCount {
        toffoli: int(c(88) * n - c(80) * s - c(88), "toffoli")?,
        cnot: int(c(240) * n - c(160) * s, "cnot")?,
        single: int(c(84) * n - c(160) * s + c(2), "single")?,
        depth: int((c(120) / r + c(8)) * n - c(120) * r - c(80), "depth")?,
        width: 0,
    };
    let qubits = qubit_width(p, HashKind::Sponge, true)?;
    Ok(Estimate { kind: HashKind::Sponge, params: p, counts: ResourceCount { width: qubits, ..counts }, qubits, source: Source::Formula })
}

/// Toffoli `(8ρ+16ρ/√s+12)n−(8s+16√s)ρ−56`, CNOT
/// `(24ρ+40ρ/√s+1)n−(16s+32√s)ρ`, single `(8ρ+16ρ/√s+7)n−(16s+32√s)ρ+2`,
/// depth `(12ρ/√s+16ρ/s+16)n−(12√s+24)ρ−50`.
pub fn blake_gate_formulas(p: ScalingParams) -> Result<Estimate> {
    if p.rho == 0 {
        return Err(Error::InvalidParams("blake needs rho ≥ 1".into()));
    }
    let r = q(p.sqrt_s()?);
    let (n, s, rho) = (q(p.n), q(p.s), q(p.rho));
    let c = Q::from_integer;
    let counts = ResourceCount {
        toffoli: int((c(8) * rho + c(16) * rho / r + c(12)) * n - (c(8) * s + c(16) * r) * rho - c(56), "toffoli")?,
        cnot: int((c(24) * rho + c(40) * rho / r + c(1)) * n - (c(16) * s + c(32) * r) * rho, "cnot")?,
        single: int((c(8) * rho + c(16) * rho / r + c(7)) * n - (c(16) * s + c(32) * r) * rho + c(2), "single")?,
        depth: int((c(12) * rho / r + c(16) * rho / s + c(16)) * n - (c(12) * r + c(24)) * rho - c(50), "depth")?,
        width: 0,
    };
    let qubits = qubit_width(p, HashKind::Blake, true)?;
    Ok(Estimate { kind: HashKind::Blake, params: p, counts: ResourceCount { width: qubits, ..counts }, qubits, source: Source::Formula })
}

pub fn gate_formulas(kind: HashKind, p: ScalingParams) -> Result<Estimate> {
    match kind {
        HashKind::Sponge => sponge_gate_formulas(p),
        HashKind::Blake => blake_gate_formulas(p),
    }
}

/// Sponge: `n` state qubits, `√s` parallel adder ancillas (else 1) and the
/// Grover ancilla. Blake: the message register doubles the state to `2n`.
pub fn qubit_width(p: ScalingParams, kind: HashKind, parallel_adders: bool) -> Result<u64> {
    let anc = if parallel_adders { p.sqrt_s()? } else { 1 };
    Ok(match kind {
        HashKind::Sponge => p.n + anc + 1,
        HashKind::Blake => 2 * p.n + anc + 1,
    })
}

/// Counts of one instantiated Grover step built by [`crate::oracles`] at toy
/// scale. `adder_ancillas` is 1 (serial) or 2 (parallel).
pub fn measured_toy_step(kind: HashKind, digest: u8, adder_ancillas: usize) -> Result<Estimate> {
    let hash = match kind {
        HashKind::Sponge => HashSpec::Sponge(SpongeParams::default()),
        HashKind::Blake => HashSpec::Blake(BlakeParams::default()),
    };
    measured_step(&OracleSpec::new(hash, digest).with_adder_ancillas(adder_ancillas)?)
}

pub fn measured_step(spec: &OracleSpec) -> Result<Estimate> {
    let layout = GroverLayout::for_kind(spec.hash.kind(), spec.adder_ancillas);
    let counts = count_resources(&build_grover_step(spec, &layout)?.instantiate()?)?;
    let params = match spec.hash {
        HashSpec::Sponge(_) => ScalingParams::TOY_SPONGE,
        HashSpec::Blake(b) => ScalingParams { rho: b.rho as u64, ..ScalingParams::TOY_BLAKE },
    };
    Ok(Estimate { kind: spec.hash.kind(), params, counts, qubits: counts.width, source: Source::Measured })
}

/// Published reference rows, toy and full size for each hash.
pub fn published_rows() -> Vec<Estimate> {
    let row = |kind, params, t, c, s, d, qubits| Estimate {
        kind,
        params,
        counts: ResourceCount { toffoli: t, cnot: c, single: s, depth: d, width: qubits },
        qubits,
        source: Source::Published,
    };
    vec![
        row(HashKind::Sponge, ScalingParams::TOY_SPONGE, 1000, 3200, 706, 1248, 19),
        row(HashKind::Sponge, ScalingParams::REAL_SPONGE, 43688, 120320, 40450, 19856, 517),
        row(HashKind::Blake, ScalingParams::TOY_BLAKE, 2240, 6928, 1650, 1550, 35),
        row(HashKind::Blake, ScalingParams::REAL_BLAKE, 157384, 414208, 150018, 64622, 2053),
    ]
}

/// Printed TOTAL column of the published rows, keyed like
/// [`published_rows`].
pub fn published_totals() -> [u64; 4] {
    [4906, 204458, 11018, 721610]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub kind: HashKind,
    pub params: ScalingParams,
    pub column: String,
    pub published: u64,
    pub formula: u64,
    pub note: String,
}

/// Cells where a published table disagrees with its own formulas.
pub fn published_discrepancies() -> Result<Vec<Discrepancy>> {
    let mut out = Vec::new();
    for (row, total) in published_rows().into_iter().zip(published_totals()) {
        let f = gate_formulas(row.kind, row.params)?;
        let cells = [
            ("toffoli", row.counts.toffoli, f.counts.toffoli),
            ("cnot", row.counts.cnot, f.counts.cnot),
            ("single", row.counts.single, f.counts.single),
            ("total", total, f.counts.total()),
            ("depth", row.counts.depth, f.counts.depth),
            ("qubits", row.qubits, f.qubits),
        ];
        let row_sum = row.counts.toffoli + row.counts.cnot + row.counts.single;
        for (column, published, formula) in cells {
            if published == formula {
                continue;
            }
            let note = match column {
                "depth" => "published depth does not follow the published depth formula".to_string(),
                _ if total == f.counts.total() && row_sum != total => format!(
                    "printed TOTAL {total} equals the formula sum, not the printed cells ({row_sum}); cell taken as a typo"
                ),
                _ => "published cell differs from formula".to_string(),
            };
            out.push(Discrepancy { kind: row.kind, params: row.params, column: column.into(), published, formula, note });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryDelta {
    pub category: String,
    pub measured: u64,
    pub formula: u64,
    /// `(measured − formula) / formula`.
    pub relative: f64,
    /// False for depth, which is reported but not gated.
    pub gated: bool,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconciliation {
    pub kind: HashKind,
    pub tolerance: f64,
    pub deltas: Vec<CategoryDelta>,
}

impl Reconciliation {
    pub fn passed(&self) -> bool {
        self.deltas.iter().filter(|d| d.gated).all(|d| d.within_tolerance)
    }
}

pub const DEFAULT_TOLERANCE: f64 = 0.10;

/// Per-class relative deltas. Gate classes pass when
/// `|measured − formula| / formula ≤ tolerance`; depth is informational.
pub fn reconcile(measured: &Estimate, formula: &Estimate, tolerance: f64) -> Result<Reconciliation> {
    if measured.params != formula.params || measured.kind != formula.kind {
        return Err(Error::InvalidParams("reconciling estimates of different parameters".into()));
    }
    let (m, f) = (measured.counts, formula.counts);
    let deltas = [
        ("toffoli", m.toffoli, f.toffoli, true),
        ("cnot", m.cnot, f.cnot, true),
        ("single", m.single, f.single, true),
        ("total", m.total(), f.total(), true),
        ("depth", m.depth, f.depth, false),
        ("qubits", measured.qubits, formula.qubits, true),
    ]
    .into_iter()
    .map(|(cat, mv, fv, gated)| {
        let relative = if fv == 0 {
            if mv == 0 { 0.0 } else { f64::INFINITY }
        } else {
            (mv as f64 - fv as f64) / fv as f64
        };
        CategoryDelta {
            category: cat.into(),
            measured: mv,
            formula: fv,
            relative,
            gated,
            within_tolerance: relative.abs() <= tolerance,
        }
    })
    .collect();
    Ok(Reconciliation { kind: measured.kind, tolerance, deltas })
}

/// CSV of a reconciliation, one row per category.
pub fn reconciliation_csv(reports: &[Reconciliation]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kind", "category", "measured", "formula", "relative_delta", "gated", "within_tolerance", "tolerance"])?;
    for r in reports {
        for d in &r.deltas {
            w.write_record([
                r.kind.to_string(),
                d.category.clone(),
                d.measured.to_string(),
                d.formula.to_string(),
                format!("{:.6}", d.relative),
                d.gated.to_string(),
                d.within_tolerance.to_string(),
                format!("{}", r.tolerance),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}
