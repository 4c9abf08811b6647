use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{merge_duplicates, sample_index, d2_seeding, DEFAULT_DELTA};
use crate::error::{Error, Result};
use crate::metric::{nearest, CostFunction, WeightedPoint};

/// Multiplier in front of the sample-size bound.
pub const DEFAULT_SAMPLE_CONSTANT: f64 = 4.0;

/// A weighted summary of a point set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coreset {
    pub entries: Vec<WeightedPoint>,
    /// Accuracy the summary was built for.
    pub epsilon: f64,
    /// Number of original stream points the summary stands for.
    pub source_size: u64,
}

impl Coreset {
    pub fn empty(epsilon: f64) -> Self {
        Coreset {
            entries: Vec::new(),
            epsilon,
            source_size: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsRamConfig {
    /// Failure probability of one construction.
    pub delta: f64,
    pub sample_constant: f64,
}

impl Default for CsRamConfig {
    fn default() -> Self {
        CsRamConfig {
            delta: DEFAULT_DELTA,
            sample_constant: DEFAULT_SAMPLE_CONSTANT,
        }
    }
}

/// Number of samples drawn for an `epsilon`-coreset of `n` points in `dim`
/// dimensions: `ceil(c * (k d ln k + ln(1/delta)) / epsilon^2)`, capped at `n`.
pub fn size_budget(n: usize, k: usize, dim: usize, epsilon: f64, cfg: &CsRamConfig) -> usize {
    let k = k.max(1) as f64;
    let bound = cfg.sample_constant * (k * dim as f64 * k.ln() + (1.0 / cfg.delta).ln()) / (epsilon * epsilon);
    let m = bound.ceil();
    if m >= n as f64 {
        n
    } else {
        m.max(1.0) as usize
    }
}

/// Offline `epsilon`-coreset by sensitivity sampling with default settings.
pub fn cs_ram(points: &[WeightedPoint], cost: CostFunction, k: usize, epsilon: f64, seed: u64) -> Result<Coreset> {
    cs_ram_with(points, cost, k, epsilon, seed, &CsRamConfig::default())
}

/// Offline `epsilon`-coreset by sensitivity sampling.
///
/// Sensitivities are bounded from a D^2 bicriteria solution `B`:
/// `s(p) = w(p) cost(p, B) / cost(P, B) + w(p) / w(cluster of p)`. Samples are
/// drawn with replacement proportionally to `s` and reweighted by
/// `w(p) / (m prob(p))`. When the sample budget reaches the number of
/// distinct input locations the input is returned with duplicates folded,
/// which is exact.
pub fn cs_ram_with(
    points: &[WeightedPoint],
    cost: CostFunction,
    k: usize,
    epsilon: f64,
    seed: u64,
    cfg: &CsRamConfig,
) -> Result<Coreset> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(Error::param(format!("delta must lie in (0,1), got {}", cfg.delta)));
    }
    if points.is_empty() {
        return Err(Error::Empty("coreset input"));
    }
    let source_size = points.len() as u64;
    let distinct = merge_duplicates(points);
    if distinct.is_empty() {
        return Err(Error::Empty("coreset input has no positive weight"));
    }
    let dim = distinct[0].point.dim();
    let m = size_budget(distinct.len(), k, dim, epsilon, cfg);
    if m >= distinct.len() || k >= distinct.len() {
        return Ok(Coreset {
            entries: distinct,
            epsilon,
            source_size,
        });
    }

    let bicriteria = d2_seeding(&distinct, cost, k, seed)?;
    let assign: Vec<(usize, f64)> = distinct.iter().map(|wp| nearest(cost, &wp.point, &bicriteria)).collect();
    let mut cluster_weight = vec![0.0; bicriteria.len()];
    let mut total_cost = 0.0;
    for (wp, &(j, c)) in distinct.iter().zip(&assign) {
        cluster_weight[j] += wp.weight;
        total_cost += wp.weight * c;
    }
    let sens: Vec<f64> = distinct
        .iter()
        .zip(&assign)
        .map(|(wp, &(j, c))| {
            let spread = if total_cost > 0.0 { wp.weight * c / total_cost } else { 0.0 };
            spread + wp.weight / cluster_weight[j]
        })
        .collect();
    let total_sens: f64 = sens.iter().sum();

    // Offset the stream so the sample draws are independent of the seeding draws.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut picked = vec![0.0f64; distinct.len()];
    for _ in 0..m {
        let i = sample_index(&mut rng, &sens, total_sens);
        let prob = sens[i] / total_sens;
        picked[i] += distinct[i].weight / (m as f64 * prob);
    }
    let entries = distinct
        .into_iter()
        .zip(picked)
        .filter(|(_, w)| *w > 0.0)
        .map(|(wp, w)| WeightedPoint { weight: w, ..wp })
        .collect();
    Ok(Coreset {
        entries,
        epsilon,
        source_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Point;

    #[test]
    fn budget_grows_as_epsilon_shrinks() {
        let cfg = CsRamConfig::default();
        let loose = size_budget(usize::MAX, 3, 2, 0.5, &cfg);
        let tight = size_budget(usize::MAX, 3, 2, 0.1, &cfg);
        assert!(tight > loose);
        assert_eq!(size_budget(10, 3, 2, 0.1, &cfg), 10);
    }

    #[test]
    fn epsilon_outside_unit_interval_is_rejected() {
        let pts = vec![WeightedPoint::unit(Point::from(vec![0.0]), 1)];
        for eps in [0.0, 1.0, -0.2, 1.5] {
            assert!(matches!(cs_ram(&pts, CostFunction::KMedian, 1, eps, 0), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn repeated_point_collapses_to_one_entry() {
        let pts: Vec<_> = (1..=25).map(|t| WeightedPoint::unit(Point::from(vec![4.0, 4.0]), t)).collect();
        let cs = cs_ram(&pts, CostFunction::KMeans, 3, 0.2, 11).unwrap();
        assert_eq!(cs.entries.len(), 1);
        assert_eq!(cs.entries[0].weight, 25.0);
        assert_eq!(cs.source_size, 25);
    }

    #[test]
    fn small_inputs_come_back_exactly() {
        let pts: Vec<_> = (1..=6).map(|t| WeightedPoint::unit(Point::from(vec![t as f64]), t)).collect();
        let cs = cs_ram(&pts, CostFunction::KMedian, 2, 0.3, 5).unwrap();
        assert_eq!(cs.entries, pts);
    }
}
