//! Shared fixtures for the benchmark targets.

use gpc_core::PersistenceDiagram;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic random diagram with `n` points and coordinates in `[0, 10]`.
pub fn random_diagram(seed: u64, n: usize) -> PersistenceDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let b: f64 = rng.gen_range(0.0..9.9);
            let len: f64 = rng.gen_range(0.01..(10.0 - b));
            (b, b + len)
        })
        .collect();
    PersistenceDiagram::from_pairs(&pairs).expect("generated pairs are valid")
}
