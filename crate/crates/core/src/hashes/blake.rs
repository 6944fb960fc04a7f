use serde::{Deserialize, Serialize};

use super::{ToyHash, Word4};

pub const BLAKE_IV: [Word4; 2] = [Word4::masked(0x8), Word4::masked(0xB)];

pub fn g_blake(a: Word4, b: Word4, x: Word4, y: Word4) -> (Word4, Word4) {
    let a = a.wrapping_add(b).wrapping_add(x);
    let b = (b ^ a).rotr(2);
    let a = a.wrapping_add(b).wrapping_add(y);
    let b = (b ^ a).rotr(1);
    (a, b)
}

/// Message word order used in round `round`: `s[i] = (i + round) mod 4`.
/// Round 0 is the identity.
pub fn schedule(round: u32) -> [usize; 4] {
    let r = (round % 4) as usize;
    [0, 1, 2, 3].map(|i| (i + r) % 4)
}

/// Working vector before the first round.
///
/// `h = (iv[0] ^ 2, iv[1])`, `v = (h[0] ^ (t mod 16), h[1] ^ (t >> 4), iv[0],
/// iv[1])`, and on the last block every bit of `v[2]` is inverted.
pub fn blake_init(t: u8, is_last: bool) -> [Word4; 4] {
    let h = [BLAKE_IV[0] ^ Word4::masked(0x2), BLAKE_IV[1]];
    let v2 = if is_last { BLAKE_IV[0].not() } else { BLAKE_IV[0] };
    [h[0] ^ Word4::masked(t), h[1] ^ Word4::masked(t >> 4), v2, BLAKE_IV[1]]
}

/// Compresses one 2x2 block and returns `v[0] v[1]` as the digest.
pub fn blake_compress(d: [Word4; 4], t: u8, is_last: bool, rho: u32) -> u8 {
    let mut v = blake_init(t, is_last);
    for r in 0..rho {
        let s = schedule(r);
        let (x0, y0, x1, y1) = (d[s[0]], d[s[1]], d[s[2]], d[s[3]]);
        (v[0], v[2]) = g_blake(v[0], v[2], x0, y0);
        (v[1], v[3]) = g_blake(v[1], v[3], x1, y1);
        (v[0], v[3]) = g_blake(v[0], v[3], x0, y0);
        (v[1], v[2]) = g_blake(v[1], v[2], x1, y1);
    }
    (v[0].value() << 4) | v[1].value()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlakeParams {
    /// Block counter.
    pub t: u8,
    pub last: bool,
    pub rho: u32,
}

impl BlakeParams {
    pub const DEFAULT_RHO: u32 = 12;

    /// Splits a 16-bit message into the block `d`, `d[0]` from the top nibble.
    pub fn block(message: u16) -> [Word4; 4] {
        [12, 8, 4, 0].map(|s| Word4::masked((message >> s) as u8))
    }
}

impl Default for BlakeParams {
    fn default() -> Self {
        BlakeParams { t: 0, last: true, rho: Self::DEFAULT_RHO }
    }
}

impl ToyHash for BlakeParams {
    fn message_bits(&self) -> u32 {
        16
    }

    fn digest(&self, message: u64) -> u8 {
        blake_compress(Self::block(message as u16), self.t, self.last, self.rho)
    }
}
