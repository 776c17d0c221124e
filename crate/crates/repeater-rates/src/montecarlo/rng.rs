//! Seeding and the one nontrivial sampling primitive.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 step; used to derive independent sub-seeds from a master seed
/// (grid points, suite sections) without correlation between consumers.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// RNG for one work chunk: the master seed keys the cipher, the chunk index
/// selects a guaranteed-disjoint stream.
pub(crate) fn chunk_rng(master_seed: u64, chunk_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(chunk_index);
    rng
}

/// Attempts until first success at probability `p0`, drawn by inverse
/// transform: `n = 1 + floor(ln(u) / ln(1-p0))` with `u` uniform on (0, 1].
/// Exact for arbitrarily small `p0`, where rejection-style sampling loops
/// forever.
pub fn sample_geometric<R: Rng + ?Sized>(p0: f64, rng: &mut R) -> u64 {
    debug_assert!(p0 > 0.0 && p0 <= 1.0);
    if p0 >= 1.0 {
        return 1;
    }
    // gen::<f64>() is [0,1); flip to (0,1] so ln never sees 0
    let u = 1.0 - rng.gen::<f64>();
    1 + (u.ln() / (-p0).ln_1p()) as u64
}
