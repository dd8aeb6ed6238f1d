//! Seeded random number generation.
//!
//! Every stochastic routine takes an explicit `u64` seed and builds its own
//! [`ChaCha8Rng`] from it, so results are a pure function of the seed and the
//! inputs. Per-cell seeds are derived by [`derive_seed`]:
//!
//! ```text
//! key  = (N << 40) | (theta_index << 24) | replication      (all fields masked)
//! seed = base XOR splitmix64(key)
//! ```
//!
//! `splitmix64` is a bijection on `u64`, so distinct keys never collide within
//! one base seed as long as the fields fit their bit budgets
//! (N < 2^24, theta index < 2^16, replication < 2^24).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TroRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> TroRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The SplitMix64 finalizer (Steele, Lea & Flood); invertible.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub const MAX_N: u64 = 1 << 24;
pub const MAX_THETA_INDEX: u64 = 1 << 16;
pub const MAX_REPLICATION: u64 = 1 << 24;

/// Derive the seed of one experiment cell from the run's base seed.
pub fn derive_seed(base: u64, n: usize, theta_index: usize, replication: usize) -> u64 {
    debug_assert!((n as u64) < MAX_N);
    debug_assert!((theta_index as u64) < MAX_THETA_INDEX);
    debug_assert!((replication as u64) < MAX_REPLICATION);
    let key = ((n as u64 & (MAX_N - 1)) << 40)
        | ((theta_index as u64 & (MAX_THETA_INDEX - 1)) << 24)
        | (replication as u64 & (MAX_REPLICATION - 1));
    base ^ splitmix64(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::collections::HashSet;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<u64> = (0..8).map({
            let mut r = rng_from_seed(42);
            move |_| r.random()
        }).collect();
        let b: Vec<u64> = (0..8).map({
            let mut r = rng_from_seed(42);
            move |_| r.random()
        }).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn derived_seeds_are_distinct() {
        let mut seen = HashSet::new();
        for n in [10usize, 50, 100, 500, 1000] {
            for t in 0..101 {
                for r in 0..20 {
                    assert!(seen.insert(derive_seed(7, n, t, r)));
                }
            }
        }
    }
}
