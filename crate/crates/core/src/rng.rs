//! Seeded random streams.
//!
//! Every consumer of randomness gets its own ChaCha8 stream: the 64-bit
//! seed fixes the key and the stream id selects one of 2^64 independent
//! keystreams under that key. Replication seeds are derived from the base
//! seed with SplitMix64, so `(base_seed, replication, stream)` pins every
//! draw of a run.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `r` of a campaign started from `base_seed`.
pub fn replication_seed(base_seed: u64, replication: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(replication))
}

/// Uniform on `(0, 1]`, so its logarithm is always finite.
#[inline]
pub fn uniform_open0(rng: &mut impl RngCore) -> f64 {
    1.0 - (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Exponential variate by inversion.
#[inline]
pub fn exponential(rng: &mut impl RngCore, rate: f64) -> f64 {
    -uniform_open0(rng).ln() / rate
}

/// Number of failures before the first success, `P{L = l} = (1-ρ) ρ^l`, by inversion.
#[inline]
pub fn geometric(rng: &mut impl RngCore, rho: f64) -> u64 {
    if rho <= 0.0 {
        return 0;
    }
    let u = uniform_open0(rng);
    (u.ln() / rho.ln()).floor() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream_is_reproducible() {
        let mut a = stream_rng(42, 3);
        let mut b = stream_rng(42, 3);
        let xa: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_eq!(xa, xb);
    }

    #[test]
    fn streams_and_seeds_differ() {
        let first = |seed, stream| stream_rng(seed, stream).next_u64();
        assert_ne!(first(42, 0), first(42, 1));
        assert_ne!(first(42, 0), first(43, 0));
        assert_ne!(replication_seed(7, 0), replication_seed(7, 1));
    }

    #[test]
    fn uniform_never_zero() {
        let mut rng = stream_rng(1, 0);
        for _ in 0..10_000 {
            let u = uniform_open0(&mut rng);
            assert!(u > 0.0 && u <= 1.0);
        }
    }

    #[test]
    fn geometric_mean() {
        let mut rng = stream_rng(5, 0);
        let rho = 0.6;
        let n = 200_000;
        let mean = (0..n).map(|_| geometric(&mut rng, rho) as f64).sum::<f64>() / n as f64;
        // mean rho/(1-rho) = 1.5, sd sqrt(rho)/(1-rho) ≈ 1.94
        assert!((mean - 1.5).abs() < 4.0 * 1.94 / (n as f64).sqrt());
        assert_eq!(geometric(&mut rng, 0.0), 0);
    }
}
