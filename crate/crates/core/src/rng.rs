//! Deterministic RNG streams.
//!
//! Every random decision draws from a [`ChaCha8Rng`] whose seed is derived from
//! the experiment seed, a purpose tag and a tuple of integer coordinates
//! (step index, node id, ...). Streams are content-addressed, so the order in
//! which they are created (or the thread that creates them) never matters.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Purpose tags keep streams for different consumers disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Activity = 0x01,
    Generation = 0x02,
    TieBreak = 0x10,
    Removal = 0x11,
    Walks = 0x20,
    WalkOrder = 0x21,
    EmbeddingInit = 0x22,
    Training = 0x23,
    Sweep = 0x30,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a base seed with a purpose tag and coordinates into a new 64-bit seed.
pub fn derive_seed(base: u64, purpose: Purpose, coords: &[u64]) -> u64 {
    let mut h = splitmix64(base ^ 0x6C69_6E6B_6C6F_6F70);
    h = splitmix64(h ^ purpose as u64);
    for &c in coords {
        h = splitmix64(h ^ c);
    }
    h
}

pub fn stream(base: u64, purpose: Purpose, coords: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive_seed(base, purpose, coords))
}

/// Encode a parameter in [0, 1] as an integer grid coordinate (1e-6 resolution).
pub fn grid_coord(x: f64) -> u64 {
    (x * 1e6).round() as i64 as u64
}
