//! Counter-based random streams.
//!
//! A master seed expands into a ChaCha8 key. Stream `s` of that key is an
//! independent sequence, and any value is addressed by (stream, word
//! position), so draws never depend on the order in which work is scheduled.

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream reserved for latent coordinates.
pub const LATENT_STREAM: u64 = u64::MAX;
/// Stream reserved for Monte Carlo integration.
pub const MC_STREAM: u64 = u64::MAX - 1;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for (`seed`, `tag`); used for replicates and call sites.
pub fn derive(seed: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ tag.wrapping_mul(0xd134_2543_de82_ef95))
}

#[derive(Clone, Debug)]
pub struct Streams {
    key: [u8; 32],
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        let mut s = seed;
        for chunk in key.chunks_mut(8) {
            s = splitmix64(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        Self { key }
    }

    pub fn stream(&self, s: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(s);
        rng
    }

    /// Stream `s` positioned at 32-bit word `pos`.
    pub fn at(&self, s: u64, pos: u128) -> ChaCha8Rng {
        let mut rng = self.stream(s);
        rng.set_word_pos(pos);
        rng
    }
}

/// Uniform on [0,1) from the top 53 bits.
#[inline]
pub fn unit(u: u64) -> f64 {
    (u >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
pub fn next_unit(rng: &mut ChaCha8Rng) -> f64 {
    unit(rng.next_u64())
}

/// Threshold t with P(u32 < t) = w up to 2^-33.
#[inline]
pub fn bernoulli_threshold(w: f64) -> u64 {
    (w.clamp(0.0, 1.0) * 4_294_967_296.0).round() as u64
}

#[inline]
pub fn next_u32(rng: &mut ChaCha8Rng) -> u32 {
    rng.next_u32()
}

#[inline]
pub fn next_u64(rng: &mut ChaCha8Rng) -> u64 {
    rng.next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_are_addressable() {
        let st = Streams::new(7);
        let mut seq = st.stream(3);
        let first: Vec<u32> = (0..40).map(|_| seq.next_u32()).collect();
        for pos in [0usize, 5, 17, 39] {
            let mut r = st.at(3, pos as u128);
            assert_eq!(r.next_u32(), first[pos]);
        }
        let mut other = st.stream(4);
        assert_ne!(other.next_u32(), first[0]);
    }

    #[test]
    fn seeds_differ() {
        let a = Streams::new(1).stream(0).next_u64();
        let b = Streams::new(2).stream(0).next_u64();
        assert_ne!(a, b);
        assert_ne!(derive(1, 0), derive(1, 1));
        assert_ne!(derive(1, 0), derive(2, 0));
    }

    #[test]
    fn thresholds() {
        assert_eq!(bernoulli_threshold(1.0), 1 << 32);
        assert_eq!(bernoulli_threshold(0.0), 0);
        assert!(unit(u64::MAX) < 1.0);
    }
}
