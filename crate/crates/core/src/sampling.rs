//! Seeded sample points: uniform on `[-2, 2]³`, kept where `n > 1e-8`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::density::Density;
use crate::vec3::Point;

pub const SAMPLE_HALF_WIDTH: f64 = 2.0;
pub const DENSITY_FLOOR: f64 = 1e-8;

const MAX_TRIES_PER_POINT: usize = 10_000;

/// `count` points in a fixed order for a given seed. Returns fewer points
/// only if acceptance is so rare that the attempt budget runs out.
pub fn sample_points<D: Density + ?Sized>(density: &D, count: usize, seed: u64) -> Vec<Point> {
    sample_points_where(density, count, seed, |_| true)
}

/// As [`sample_points`], with an extra acceptance predicate.
pub fn sample_points_where<D: Density + ?Sized>(
    density: &D,
    count: usize,
    seed: u64,
    accept: impl Fn(Point) -> bool,
) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count && tries < count.saturating_mul(MAX_TRIES_PER_POINT) {
        tries += 1;
        let p = draw(&mut rng);
        if density.value(p) > DENSITY_FLOOR && accept(p) {
            out.push(p);
        }
    }
    out
}

/// Pairs of accepted points with distinct members.
pub fn sample_pairs<D: Density + ?Sized>(density: &D, count: usize, seed: u64) -> Vec<(Point, Point)> {
    let pts = sample_points(density, 2 * count, seed);
    pts.chunks_exact(2).filter(|c| c[0] != c[1]).map(|c| (c[0], c[1])).collect()
}

/// Axis-aligned boxes with lower corners in `[-2, 1]³` and side lengths in
/// `[0.5, 2]`.
pub fn sample_boxes(count: usize, seed: u64) -> Vec<(Point, Point)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let lo: Point = core::array::from_fn(|_| rng.random_range(-SAMPLE_HALF_WIDTH..1.0));
            let hi: Point = core::array::from_fn(|i| lo[i] + rng.random_range(0.5..SAMPLE_HALF_WIDTH));
            (lo, hi)
        })
        .collect()
}

fn draw(rng: &mut ChaCha8Rng) -> Point {
    core::array::from_fn(|_| rng.random_range(-SAMPLE_HALF_WIDTH..SAMPLE_HALF_WIDTH))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensityModel;

    #[test]
    fn deterministic_for_seed() {
        let d = DensityModel::gaussian(1.0, 1.0).unwrap();
        assert_eq!(sample_points(&d, 50, 7), sample_points(&d, 50, 7));
        assert_ne!(sample_points(&d, 50, 7), sample_points(&d, 50, 8));
    }

    #[test]
    fn respects_floor_and_box() {
        let d = DensityModel::gaussian(1.0, 3.0).unwrap();
        let pts = sample_points(&d, 200, 1);
        assert_eq!(pts.len(), 200);
        for p in pts {
            assert!(d.value(p) > DENSITY_FLOOR);
            assert!(p.iter().all(|x| x.abs() <= SAMPLE_HALF_WIDTH));
        }
    }

    #[test]
    fn boxes_are_proper_and_seeded() {
        let b = sample_boxes(5, 11);
        assert_eq!(b, sample_boxes(5, 11));
        for (lo, hi) in b {
            assert!((0..3).all(|i| hi[i] - lo[i] >= 0.5 && lo[i] >= -2.0));
        }
    }

    #[test]
    fn pairs_are_distinct() {
        let d = DensityModel::slater(1.0, 1.0).unwrap();
        let pairs = sample_pairs(&d, 100, 3);
        assert_eq!(pairs.len(), 100);
        assert!(pairs.iter().all(|(a, b)| a != b));
    }
}
