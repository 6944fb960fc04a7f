//! Classical reference implementations of the two toy ARX hashes and
//! brute-force preimage search.
//!
//! Both hashes work on 4-bit words. The sponge hash absorbs an 8-bit message
//! into a 16-bit state; the BLAKE-style hash compresses a 16-bit message block.
//! Both return an 8-bit digest.

mod blake;
mod sponge;

pub use blake::{blake_compress, blake_init, g_blake, schedule, BlakeParams, BLAKE_IV};
pub use sponge::{chacha_pi, col_qr, diag_qr, qr_sponge, sponge_hash, SpongeParams, SpongeState};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::BitXor;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 4-bit word.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word4(u8);

impl Word4 {
    pub const ZERO: Word4 = Word4(0);

    /// Keeps the low four bits of `v`.
    pub const fn masked(v: u8) -> Self {
        Word4(v & 0xF)
    }

    pub const fn value(self) -> u8 {
        self.0
    }

    pub const fn wrapping_add(self, other: Word4) -> Word4 {
        Word4((self.0 + other.0) & 0xF)
    }

    pub const fn rotl(self, r: u32) -> Word4 {
        let r = r % 4;
        Word4(((self.0 << r) | (self.0 >> ((4 - r) % 4))) & 0xF)
    }

    pub const fn rotr(self, r: u32) -> Word4 {
        self.rotl((4 - r % 4) % 4)
    }

    pub const fn not(self) -> Word4 {
        Word4(!self.0 & 0xF)
    }
}

impl TryFrom<u8> for Word4 {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        if v < 16 {
            Ok(Word4(v))
        } else {
            Err(Error::InvalidParams(format!("{v} does not fit in a 4-bit word")))
        }
    }
}

impl From<Word4> for u8 {
    fn from(w: Word4) -> u8 {
        w.0
    }
}

impl BitXor for Word4 {
    type Output = Word4;

    fn bitxor(self, rhs: Word4) -> Word4 {
        Word4(self.0 ^ rhs.0)
    }
}

impl fmt::Display for Word4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

/// A hash with a small message space and an 8-bit digest.
pub trait ToyHash: Sync {
    fn message_bits(&self) -> u32;
    fn digest(&self, message: u64) -> u8;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HashKind {
    Sponge,
    Blake,
}

impl fmt::Display for HashKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HashKind::Sponge => "sponge",
            HashKind::Blake => "blake",
        })
    }
}

/// One of the two toy hashes together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HashSpec {
    Sponge(SpongeParams),
    Blake(BlakeParams),
}

impl HashSpec {
    pub fn kind(&self) -> HashKind {
        match self {
            HashSpec::Sponge(_) => HashKind::Sponge,
            HashSpec::Blake(_) => HashKind::Blake,
        }
    }
}

impl ToyHash for HashSpec {
    fn message_bits(&self) -> u32 {
        match self {
            HashSpec::Sponge(p) => p.message_bits(),
            HashSpec::Blake(p) => p.message_bits(),
        }
    }

    fn digest(&self, message: u64) -> u8 {
        match self {
            HashSpec::Sponge(p) => p.digest(message),
            HashSpec::Blake(p) => p.digest(message),
        }
    }
}

/// A target digest and its complete preimage set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashInstance {
    pub hash: HashSpec,
    pub digest: u8,
    /// Sorted ascending.
    pub preimages: Vec<u64>,
}

impl HashInstance {
    /// Number of preimages.
    pub fn m(&self) -> usize {
        self.preimages.len()
    }

    /// Size of the message space.
    pub fn n(&self) -> u64 {
        1u64 << self.hash.message_bits()
    }

    pub fn message_bits(&self) -> u32 {
        self.hash.message_bits()
    }

    pub fn is_preimage(&self, message: u64) -> bool {
        self.preimages.binary_search(&message).is_ok()
    }
}

/// Largest message space searched exhaustively.
pub const MAX_MESSAGE_BITS: u32 = 20;

fn check_space(hash: &dyn ToyHash) -> Result<()> {
    let bits = hash.message_bits();
    if bits > MAX_MESSAGE_BITS {
        return Err(Error::MessageSpaceTooLarge { bits });
    }
    Ok(())
}

/// Evaluates `hash` on every message and keeps those that map to `digest`.
/// An empty preimage set is a valid result.
pub fn enumerate_preimages(digest: u8, hash: HashSpec) -> Result<HashInstance> {
    check_space(&hash)?;
    let preimages = (0..1u64 << hash.message_bits()).filter(|&m| hash.digest(m) == digest).collect();
    Ok(HashInstance { hash, digest, preimages })
}

/// Preimage sets of all 256 digests, indexed by digest.
pub fn digest_table(hash: &dyn ToyHash) -> Result<Vec<Vec<u64>>> {
    check_space(hash)?;
    let mut table = vec![Vec::new(); 256];
    for m in 0..1u64 << hash.message_bits() {
        table[hash.digest(m) as usize].push(m);
    }
    Ok(table)
}

/// Digests grouped by preimage count; counts with no digest are absent.
pub fn digests_by_count(hash: &dyn ToyHash) -> Result<BTreeMap<usize, Vec<u8>>> {
    let mut out: BTreeMap<usize, Vec<u8>> = BTreeMap::new();
    for (d, pre) in digest_table(hash)?.iter().enumerate() {
        out.entry(pre.len()).or_default().push(d as u8);
    }
    Ok(out)
}

/// Smallest-IV sponge instance whose digest has exactly `m` preimages.
///
/// IVs are scanned upward from 0 and, within an IV, the smallest qualifying
/// digest is taken. `None` if no IV below 2^16 works.
pub fn find_sponge_instance(m: usize, rounds: u32) -> Option<HashInstance> {
    (0..=u16::MAX).find_map(|iv| {
        let hash = HashSpec::Sponge(SpongeParams { iv, rounds });
        let table = digest_table(&hash).ok()?;
        let digest = table.iter().position(|p| p.len() == m)?;
        Some(HashInstance { hash, digest: digest as u8, preimages: table[digest].clone() })
    })
}
