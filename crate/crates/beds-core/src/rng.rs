//! Deterministic stream derivation for all randomness in the laboratory.
//!
//! Every run owns a single 64-bit seed. Independent streams are derived by
//! hashing a stable textual label with FNV-1a, mixing it with the seed
//! through SplitMix64, and expanding the result into a ChaCha12 key. The
//! same `(seed, label)` pair yields the same stream on every platform.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// 64-bit FNV-1a hash of a label.
pub fn fnv1a64(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the RNG stream for `(seed, label)`.
pub fn stream(seed: u64, label: &str) -> ChaCha12Rng {
    let mut state = seed ^ fnv1a64(label);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}
