//! Seeded batch sweeps over random transforms. Each item depends only on its
//! seed, so results are identical in both execution modes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bogoliubov::{compose, random_transform, transform_distance};
use crate::elements::multiport;
use crate::error::Result;
use crate::linalg::{haar_unitary, ToleranceConfig};
use crate::parallel::{map_indexed, Exec};
use crate::reduction::{recompose, reduce, squeeze_spectrum};
use crate::state::{verify_single_excitation_structure, StructureReport};

/// Mode count for item `seed` of a sweep with at most `max_n` modes.
pub fn modes_for_seed(seed: u64, max_n: usize) -> usize {
    1 + (seed as usize % max_n.max(1))
}

/// `transform_distance(recompose(reduce(T)), T)` for seeds `0..count`.
pub fn reduction_roundtrip(
    count: usize,
    max_n: usize,
    max_r: f64,
    tol: &ToleranceConfig,
    exec: Exec,
) -> Result<Vec<f64>> {
    map_indexed(exec, count, |k| {
        let seed = k as u64;
        let t = random_transform(modes_for_seed(seed, max_n), max_r, seed);
        transform_distance(&recompose(&reduce(&t, tol)?, tol)?, &t)
    })
    .into_iter()
    .collect()
}

/// Largest change of the squeeze spectrum of `random_transform(n, max_r,
/// seed)` under `count` random passive pre- and post-compositions.
pub fn spectrum_invariance(
    n: usize,
    max_r: f64,
    seed: u64,
    count: usize,
    tol: &ToleranceConfig,
    exec: Exec,
) -> Result<Vec<f64>> {
    let t = random_transform(n, max_r, seed);
    let base = squeeze_spectrum(&t, tol)?;
    map_indexed(exec, count, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(k as u64));
        let pre = multiport(n, &haar_unitary(n, &mut rng), tol)?;
        let post = multiport(n, &haar_unitary(n, &mut rng), tol)?;
        let moved = compose(&post, &compose(&t, &pre)?)?;
        let spec = squeeze_spectrum(&moved, tol)?;
        Ok(spec
            .iter()
            .zip(&base)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs())))
    })
    .into_iter()
    .collect()
}

/// Single-excitation structure checks on random 4-mode transforms: click on
/// a random mode, vacuum on a random subset of the others.
pub fn nogo_sweep(
    count: usize,
    max_r: f64,
    cutoff: usize,
    tol: &ToleranceConfig,
    exec: Exec,
) -> Result<Vec<StructureReport>> {
    map_indexed(exec, count, |k| {
        let seed = k as u64;
        let t = random_transform(4, max_r, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let click = rng.random_range(0..4);
        let detected: Vec<usize> = (0..4).filter(|&m| m != click && rng.random_bool(0.5)).collect();
        verify_single_excitation_structure(&t, &detected, click, cutoff, tol)
    })
    .into_iter()
    .collect()
}
