//! Seeded random instances.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`. Bounded integers are drawn with Lemire's
//! multiply-and-reject method on `next_u64`, implemented here so that the
//! mapping from seed to instance does not depend on any distribution code
//! outside this crate.

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Instance, InstanceError, Point, Weight, MIN_VERTICES};

/// Coordinates are drawn from `[0, GRID)`.
pub const GRID: u64 = 10_000;
/// Metric instances start from weights in `[1, MAX_RAW_WEIGHT]`.
pub const MAX_RAW_WEIGHT: u64 = 1_000;

/// Uniform integer in `[0, bound)`.
pub fn uniform_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    assert!(bound > 0);
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let product = u128::from(rng.next_u64()) * u128::from(bound);
        if (product as u64) >= threshold {
            return (product >> 64) as u64;
        }
    }
}

pub fn gen_random_euclidean(n: usize, seed: u64) -> Result<Instance, InstanceError> {
    if n < MIN_VERTICES {
        return Err(InstanceError::TooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            let x = uniform_below(&mut rng, GRID);
            let y = uniform_below(&mut rng, GRID);
            Point::new(x as f64, y as f64)
        })
        .collect();
    Instance::from_points(format!("euclidean-n{n}-s{seed}"), points)
}

pub fn gen_random_metric(n: usize, seed: u64) -> Result<Instance, InstanceError> {
    if n < MIN_VERTICES {
        return Err(InstanceError::TooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![vec![0 as Weight; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = 1 + uniform_below(&mut rng, MAX_RAW_WEIGHT) as Weight;
            rows[i][j] = w;
            rows[j][i] = w;
        }
    }
    metric_closure(&mut rows);
    Instance::from_matrix(format!("metric-n{n}-s{seed}"), &rows)
}

/// Replaces every entry with its all-pairs shortest-path distance (Floyd–Warshall).
pub fn metric_closure(rows: &mut [Vec<Weight>]) {
    let n = rows.len();
    for k in 0..n {
        for i in 0..n {
            let ik = rows[i][k];
            for j in 0..n {
                let through = ik + rows[k][j];
                if through < rows[i][j] {
                    rows[i][j] = through;
                }
            }
        }
    }
}

/// SplitMix64 finaliser, used to derive per-instance seeds.
pub fn mix_seed(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th instance of size `n` in a run with base `seed`.
pub fn instance_seed(seed: u64, n: usize, index: usize) -> u64 {
    mix_seed(mix_seed(seed) ^ ((n as u64) << 32 | index as u64))
}
