//! Seeded random streams for the Monte Carlo estimators.
//!
//! Every estimator consumes randomness in chunks of [`CHUNK_SIZE`] samples;
//! chunk `k` under seed `s` always uses ChaCha12 stream `k` of the keyed
//! generator for `s`.  Results therefore depend only on `(seed, samples)`,
//! never on how the chunks are scheduled, and experiments that need several
//! independent streams (directions vs. per-direction samples) derive
//! sub-seeds with [`derive_seed`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Number of samples drawn from one generator stream.
pub const CHUNK_SIZE: u64 = 65_536;

/// Generator for chunk `chunk` of the work under `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Splits `total` samples into `(chunk_index, chunk_len)` pairs.
pub(crate) fn chunk_layout(total: u64) -> impl Iterator<Item = (u64, u64)> {
    (0..).scan(total, |remaining, index| {
        if *remaining == 0 {
            None
        } else {
            let take = (*remaining).min(CHUNK_SIZE);
            *remaining -= take;
            Some((index, take))
        }
    })
}

/// Mixes a label into a seed (splitmix64 finalizer), giving an
/// independent stream family for a sub-experiment.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    let mut x = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Fills `out` with a uniform point on the unit sphere by normalizing a
/// standard Gaussian vector (rejection-free up to the measure-zero origin).
pub fn unit_sphere(rng: &mut impl Rng, out: &mut [f64]) {
    debug_assert!(!out.is_empty());
    loop {
        let mut norm_sq = 0.0;
        for x in out.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *x = g;
            norm_sq += g * g;
        }
        if norm_sq > 0.0 {
            let inv = 1.0 / norm_sq.sqrt();
            for x in out.iter_mut() {
                *x *= inv;
            }
            return;
        }
    }
}
