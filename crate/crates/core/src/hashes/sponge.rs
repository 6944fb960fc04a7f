use serde::{Deserialize, Serialize};

use super::{ToyHash, Word4};

/// 2x2 matrix of 4-bit words, row-major: `v[0] v[1]` on top (the rate),
/// `v[2] v[3]` below (the capacity).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct SpongeState {
    pub v: [Word4; 4],
}

impl SpongeState {
    /// `v[0]` is the most significant nibble.
    pub fn from_u16(x: u16) -> Self {
        SpongeState { v: [12, 8, 4, 0].map(|s| Word4::masked((x >> s) as u8)) }
    }

    pub fn to_u16(self) -> u16 {
        self.v.iter().fold(0u16, |acc, w| (acc << 4) | w.value() as u16)
    }

    /// The two rate words as a byte, `v[0]` high.
    pub fn rate(self) -> u8 {
        (self.v[0].value() << 4) | self.v[1].value()
    }
}

pub fn qr_sponge(a: Word4, b: Word4) -> (Word4, Word4) {
    let a = a.wrapping_add(b);
    let b = (b ^ a).rotl(2);
    let a = a.wrapping_add(b);
    let b = (b ^ a).rotl(1);
    (a, b)
}

pub fn col_qr(s: &mut SpongeState) {
    let v = &mut s.v;
    (v[0], v[2]) = qr_sponge(v[0], v[2]);
    (v[1], v[3]) = qr_sponge(v[1], v[3]);
}

pub fn diag_qr(s: &mut SpongeState) {
    let v = &mut s.v;
    (v[0], v[3]) = qr_sponge(v[0], v[3]);
    (v[1], v[2]) = qr_sponge(v[1], v[2]);
}

/// `rounds` double rounds, each a column pass followed by a diagonal pass.
pub fn chacha_pi(mut state: SpongeState, rounds: u32) -> SpongeState {
    for _ in 0..rounds {
        col_qr(&mut state);
        diag_qr(&mut state);
    }
    state
}

/// Single-block sponge: the message is XORed into the rate of the IV state,
/// the permutation is applied once and the rate is squeezed as the digest.
pub fn sponge_hash(message: u8, iv: u16) -> u8 {
    SpongeParams { iv, rounds: SpongeParams::DEFAULT_ROUNDS }.digest(message as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpongeParams {
    /// Initial 16-bit state, `v[0]` in the top nibble.
    pub iv: u16,
    pub rounds: u32,
}

impl SpongeParams {
    pub const DEFAULT_ROUNDS: u32 = 10;
}

impl Default for SpongeParams {
    fn default() -> Self {
        SpongeParams { iv: 0, rounds: Self::DEFAULT_ROUNDS }
    }
}

impl ToyHash for SpongeParams {
    fn message_bits(&self) -> u32 {
        8
    }

    fn digest(&self, message: u64) -> u8 {
        let mut s = SpongeState::from_u16(self.iv);
        s.v[0] = s.v[0] ^ Word4::masked((message >> 4) as u8);
        s.v[1] = s.v[1] ^ Word4::masked(message as u8);
        chacha_pi(s, self.rounds).rate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: u8) -> Word4 {
        Word4::masked(v)
    }

    // Straight-line reference on plain integers.
    fn ref_qr(a: u32, b: u32) -> (u32, u32) {
        let rl = |x: u32, r: u32| ((x << r) | (x >> (4 - r))) & 15;
        let a = (a + b) % 16;
        let b = rl(b ^ a, 2);
        let a = (a + b) % 16;
        (a, rl(b ^ a, 1))
    }

    fn ref_pi(mut v: [u32; 4], rounds: u32) -> [u32; 4] {
        for _ in 0..rounds {
            for (i, j) in [(0, 2), (1, 3), (0, 3), (1, 2)] {
                (v[i], v[j]) = ref_qr(v[i], v[j]);
            }
        }
        v
    }

    #[test]
    fn qr_fixed_point_and_hand_trace() {
        assert_eq!(qr_sponge(w(0), w(0)), (w(0), w(0)));
        assert_eq!(qr_sponge(w(1), w(0)), (w(5), w(2)));
    }

    #[test]
    fn qr_matches_reference_and_is_bijective() {
        let mut seen = [false; 256];
        for a in 0..16u8 {
            for b in 0..16u8 {
                let (x, y) = qr_sponge(w(a), w(b));
                assert_eq!((x.value() as u32, y.value() as u32), ref_qr(a as u32, b as u32));
                let key = (x.value() as usize) << 4 | y.value() as usize;
                assert!(!seen[key]);
                seen[key] = true;
            }
        }
    }

    #[test]
    fn permutation_is_bijective_and_matches_reference() {
        let mut seen = vec![false; 1 << 16];
        for x in 0..=u16::MAX {
            let out = chacha_pi(SpongeState::from_u16(x), 10);
            let v = [12, 8, 4, 0].map(|s| ((x >> s) & 15) as u32);
            assert_eq!(out.v.map(|w| w.value() as u32), ref_pi(v, 10));
            let y = out.to_u16() as usize;
            assert!(!seen[y]);
            seen[y] = true;
        }
    }

    #[test]
    fn one_round_on_unit_state() {
        let s = chacha_pi(SpongeState::from_u16(0x1000), 1);
        // Column pass: (v0,v2) = QR(1,0) = (5,2); (v1,v3) = QR(0,0).
        // Diagonal pass: (v0,v3) = QR(5,0); (v1,v2) = QR(0,2).
        let (v0, v3) = qr_sponge(w(5), w(0));
        let (v1, v2) = qr_sponge(w(0), w(2));
        assert_eq!(s.v, [v0, v1, v2, v3]);
        assert_eq!(s.v.map(|w| w.value() as u32), ref_pi([1, 0, 0, 0], 1));
    }

    #[test]
    fn zero_state_is_fixed() {
        for r in [1, 3, 10] {
            assert_eq!(chacha_pi(SpongeState::default(), r).to_u16(), 0);
        }
    }

    #[test]
    fn message_cancelling_the_rate_hashes_like_zero() {
        let iv = 0xA700;
        let zero = chacha_pi(SpongeState::default(), 10).rate();
        assert_eq!(sponge_hash(0xA7, iv), zero);
    }

    #[test]
    fn state_packing_round_trips() {
        let s = SpongeState::from_u16(0x1234);
        assert_eq!(s.v.map(Word4::value), [1, 2, 3, 4]);
        assert_eq!(s.to_u16(), 0x1234);
        assert_eq!(s.rate(), 0x12);
    }

    #[test]
    fn hash_is_deterministic() {
        for m in 0..=255u8 {
            assert_eq!(sponge_hash(m, 0x0F0F), sponge_hash(m, 0x0F0F));
        }
    }
}
