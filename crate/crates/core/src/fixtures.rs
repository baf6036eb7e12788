//! Randomized finite arrow tables for the exact property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env::{Arrow, ArrowEnvironment, FiniteEnv};
use crate::rng::replica_seed;

#[derive(Debug, Clone)]
pub struct Fixture {
    pub index: u64,
    pub env: ArrowEnvironment,
    pub k: usize,
}

impl Fixture {
    pub fn finite(&self) -> &FiniteEnv {
        self.env.as_finite().expect("fixtures are finite")
    }
}

/// Fixture `index` of the family seeded by `seed`: window `[lo, hi]` with
/// `lo` in `[-4, 0]` and `hi` in `[1, 6]`, depth in `[1, 8]`, `k` in
/// `{1, 2, 3}`, arrows `Right` with a per-fixture probability.
pub fn fixture(seed: u64, index: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(replica_seed(seed, index));
    let lo = rng.random_range(-4..=0);
    let hi = rng.random_range(1..=6);
    let depth = rng.random_range(1..=8u64);
    let k = rng.random_range(1..=3);
    let q: f64 = rng.random_range(0.25..0.85);
    let rows = (lo..=hi)
        .map(|_| {
            (0..depth)
                .map(|_| {
                    if rng.random_bool(q) {
                        Arrow::Right
                    } else {
                        Arrow::Left
                    }
                })
                .collect()
        })
        .collect();
    let env = FiniteEnv::new(lo, hi, depth, rows).expect("valid window");
    Fixture {
        index,
        env: ArrowEnvironment::finite(env),
        k,
    }
}

pub fn fixtures(seed: u64, count: u64) -> impl Iterator<Item = Fixture> {
    (0..count).map(move |i| fixture(seed, i))
}

/// Random starting sites inside the fixture window.
pub fn random_starts(f: &Fixture, salt: u64) -> Vec<i64> {
    let (lo, hi) = f.finite().window();
    let mut rng = ChaCha8Rng::seed_from_u64(replica_seed(salt, f.index));
    (0..f.k).map(|_| rng.random_range(lo..=hi)).collect()
}
