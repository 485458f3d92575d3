#![allow(dead_code)]

use csgrav::jetfields::{Chart, ValuedForm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(chart: &Chart, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let (lower, extent) = chart.extent();
    (0..count)
        .map(|_| {
            lower
                .iter()
                .zip(&extent)
                .map(|(l, e)| l + e * rng.gen_range(0.0..1.0))
                .collect()
        })
        .collect()
}

/// Largest coefficient value of `a` over the points.
pub fn sup(a: &ValuedForm, points: &[Vec<f64>]) -> f64 {
    a.sup_norm(points).unwrap()
}

/// Largest coefficient difference between two forms of equal shape.
pub fn sup_diff(a: &ValuedForm, b: &ValuedForm, points: &[Vec<f64>]) -> f64 {
    sup(&a.sub(b).unwrap(), points)
}
