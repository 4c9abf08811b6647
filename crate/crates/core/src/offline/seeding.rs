use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::metric::{nearest, CostFunction, Point, WeightedPoint};

/// Draws an index with probability proportional to `mass`. `total` must be
/// the positive sum of `mass`.
pub(crate) fn sample_index(rng: &mut impl Rng, mass: &[f64], total: f64) -> usize {
    let mut target = rng.random::<f64>() * total;
    let mut last_positive = 0;
    for (i, &m) in mass.iter().enumerate() {
        if m <= 0.0 {
            continue;
        }
        last_positive = i;
        if target < m {
            return i;
        }
        target -= m;
    }
    last_positive
}

/// Weighted D^2 seeding: the first seed is drawn proportionally to weight,
/// each later one proportionally to `weight * cost(p, nearest seed)`.
///
/// Returns `k` distinct seeds when the input has at least `k` distinct
/// points of positive weight, otherwise all of them.
pub fn d2_seeding(points: &[WeightedPoint], cost: CostFunction, k: usize, seed: u64) -> Result<Vec<Point>> {
    if points.is_empty() {
        return Err(Error::Empty("seeding input"));
    }
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = points.iter().map(|p| p.weight.max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::Empty("seeding input has no positive weight"));
    }
    let first = sample_index(&mut rng, &weights, total);
    let mut seeds = vec![points[first].point.clone()];
    let mut closest: Vec<f64> = points.iter().map(|p| cost.cost(&p.point, &seeds[0])).collect();

    while seeds.len() < k {
        let mass: Vec<f64> = weights.iter().zip(&closest).map(|(w, c)| w * c).collect();
        let total: f64 = mass.iter().sum();
        if !(total > 0.0) {
            break;
        }
        let next = sample_index(&mut rng, &mass, total);
        let s = points[next].point.clone();
        for (c, p) in closest.iter_mut().zip(points) {
            *c = c.min(cost.cost(&p.point, &s));
        }
        seeds.push(s);
    }
    debug_assert!(seeds.iter().all(|s| nearest(cost, s, &seeds).1 == 0.0));
    Ok(seeds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wp(c: &[f64], w: f64) -> WeightedPoint {
        WeightedPoint::new(Point::from(c.to_vec()), w, 1)
    }

    #[test]
    fn single_seed_follows_weight() {
        // Only the heavy point carries weight, so it is the only possible draw.
        let pts = vec![wp(&[0.0], 0.0), wp(&[5.0], 3.0)];
        for seed in 0..20 {
            assert_eq!(d2_seeding(&pts, CostFunction::KMedian, 1, seed).unwrap(), vec![Point::from(vec![5.0])]);
        }
    }

    #[test]
    fn two_points_two_seeds_is_forced() {
        let pts = vec![wp(&[0.0, 0.0], 1.0), wp(&[1.0, 1.0], 1.0)];
        for seed in 0..20 {
            let mut s = d2_seeding(&pts, CostFunction::KMeans, 2, seed).unwrap();
            s.sort_by(|a, b| a.coords.partial_cmp(&b.coords).unwrap());
            assert_eq!(s, vec![pts[0].point.clone(), pts[1].point.clone()]);
        }
    }

    #[test]
    fn duplicates_cap_the_seed_count() {
        let pts = vec![wp(&[2.0], 1.0), wp(&[2.0], 1.0), wp(&[2.0], 4.0)];
        assert_eq!(d2_seeding(&pts, CostFunction::KMedian, 3, 0).unwrap().len(), 1);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(d2_seeding(&[], CostFunction::KMedian, 1, 0), Err(Error::Empty(_))));
    }
}
