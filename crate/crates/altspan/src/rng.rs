//! Seeded randomness with named stream derivation.
//!
//! Every stochastic choice in the toolkit draws from a `ChaCha8Rng` whose seed
//! is derived from one run seed plus a purpose string and an index. Derived
//! streams are independent of each other and of invocation order, so any stage
//! (a forest tree, a k-means restart, a synthetic article) can be regenerated
//! in isolation.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Derive a child seed from `(seed, purpose, index)`.
///
/// FNV-1a over the inputs followed by a splitmix64 finalizer; stable across
/// platforms and releases of this crate.
pub fn derive_seed(seed: u64, purpose: &str, index: u64) -> u64 {
    const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const FNV_PRIME: u64 = 0x1000_0000_01b3;

    let mut h = FNV_OFFSET;
    for &b in seed
        .to_le_bytes()
        .iter()
        .chain(purpose.as_bytes())
        .chain(index.to_le_bytes().iter())
    {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    splitmix64(h)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A reproducible RNG for the named stream.
pub fn stream(seed: u64, purpose: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, purpose, index))
}

/// Standard normal draw via Box-Muller.
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    use rand::Rng;
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
