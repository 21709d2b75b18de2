//! Seeded random points for validation sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the unit ball of dimension `dim`, by rejection.
pub fn ball(rng: &mut SampleRng, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        if p.iter().map(|x| x * x).sum::<f64>() < 1.0 {
            return p.into_iter().map(|x| x * radius).collect();
        }
    }
}

/// Coordinates uniform in [-1, 1], except the listed groups which are drawn
/// jointly from the unit ball.
pub fn chart_point(rng: &mut SampleRng, dim: usize, balls: &[Vec<usize>]) -> Vec<f64> {
    let mut p: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    for group in balls {
        let b = ball(rng, group.len(), 1.0);
        for (&i, v) in group.iter().zip(b) {
            p[i] = v;
        }
    }
    p
}

pub fn uniform(rng: &mut SampleRng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}
