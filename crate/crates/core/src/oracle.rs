//! Brute-force ground truth: exact decayed costs, exhaustive discrete
//! k-median, and coreset checks over a finite grid of candidate center sets.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{decay_weight, weighted_cost, CostFunction, DecayFunction, Point, WeightedPoint};
use crate::offline::merge_duplicates;

/// Largest number of candidate center sets an exhaustive routine may visit.
pub const COMBINATORIAL_BUDGET: u128 = 50_000;

/// Numerical slack added to `epsilon` when checking coreset ratios.
pub const RATIO_SLACK: f64 = 1e-9;

/// `C(n, k)`, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GridProvenance {
    AllSubsets,
    LatticeGrid { step: f64 },
    SampledSubsets { count: usize, seed: u64 },
    Explicit,
}

/// Finite set of candidate center sets standing in for "every query".
#[derive(Clone, Debug, PartialEq)]
pub struct QueryGrid {
    pub candidates: Vec<Vec<Point>>,
    pub provenance: GridProvenance,
}

fn distinct_locations(points: &[Point]) -> Vec<Point> {
    let wps: Vec<WeightedPoint> = points.iter().map(|p| WeightedPoint::unit(p.clone(), 1)).collect();
    merge_duplicates(&wps).into_iter().map(|wp| wp.point).collect()
}

/// Calls `visit` with every k-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k == 0 || k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + (i - 1) {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl QueryGrid {
    pub fn explicit(candidates: Vec<Vec<Point>>) -> Self {
        QueryGrid {
            candidates,
            provenance: GridProvenance::Explicit,
        }
    }

    /// Every k-subset of the distinct input locations.
    pub fn all_subsets(points: &[Point], k: usize) -> Result<Self> {
        let locs = distinct_locations(points);
        let count = binomial(locs.len(), k);
        if count > COMBINATORIAL_BUDGET {
            return Err(Error::BudgetExceeded {
                candidates: count,
                budget: COMBINATORIAL_BUDGET,
            });
        }
        let mut candidates = Vec::with_capacity(count as usize);
        for_each_subset(locs.len(), k, |idx| candidates.push(idx.iter().map(|&i| locs[i].clone()).collect()));
        Ok(QueryGrid {
            candidates,
            provenance: GridProvenance::AllSubsets,
        })
    }

    /// Every k-subset of the lattice with spacing `step` covering the
    /// bounding box of `points`.
    pub fn lattice(points: &[Point], k: usize, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::param(format!("lattice step must be > 0, got {step}")));
        }
        let Some(first) = points.first() else {
            return Err(Error::Empty("lattice input"));
        };
        let dim = first.dim();
        let mut lo = first.coords.clone();
        let mut hi = first.coords.clone();
        for p in points {
            for d in 0..dim {
                lo[d] = lo[d].min(p.coords[d]);
                hi[d] = hi[d].max(p.coords[d]);
            }
        }
        let per_axis: Vec<usize> = (0..dim).map(|d| ((hi[d] - lo[d]) / step).floor() as usize + 1).collect();
        let nodes_count = per_axis.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n)).unwrap_or(usize::MAX);
        let count = binomial(nodes_count, k);
        if count > COMBINATORIAL_BUDGET {
            return Err(Error::BudgetExceeded {
                candidates: count,
                budget: COMBINATORIAL_BUDGET,
            });
        }
        let nodes: Vec<Point> = (0..nodes_count)
            .map(|mut flat| {
                let coords = (0..dim)
                    .map(|d| {
                        let j = flat % per_axis[d];
                        flat /= per_axis[d];
                        lo[d] + j as f64 * step
                    })
                    .collect();
                Point { coords }
            })
            .collect();
        let mut candidates = Vec::with_capacity(count as usize);
        for_each_subset(nodes.len(), k, |idx| candidates.push(idx.iter().map(|&i| nodes[i].clone()).collect()));
        Ok(QueryGrid {
            candidates,
            provenance: GridProvenance::LatticeGrid { step },
        })
    }

    /// `count` random k-subsets of the distinct input locations.
    pub fn sampled_subsets(points: &[Point], k: usize, count: usize, seed: u64) -> Result<Self> {
        let locs = distinct_locations(points);
        if locs.is_empty() {
            return Err(Error::Empty("grid input"));
        }
        if k == 0 || k > locs.len() {
            return Err(Error::param(format!("need k in 1..={} for sampled subsets, got {k}", locs.len())));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let candidates = (0..count)
            .map(|_| sample(&mut rng, locs.len(), k).into_iter().map(|i| locs[i].clone()).collect())
            .collect();
        Ok(QueryGrid {
            candidates,
            provenance: GridProvenance::SampledSubsets { count, seed },
        })
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

/// Attaches the decayed weight at time `now` to every point, multiplied by
/// the point's own weight.
///
/// Exponential weights are normalized so an item arriving at `now` has
/// weight 1: the result is `2^((t - now) / h)`.
pub fn materialize_weights(points: &[WeightedPoint], decay: DecayFunction, now: u64) -> Result<Vec<WeightedPoint>> {
    let reference = match decay {
        DecayFunction::Polynomial { .. } => 0.0,
        DecayFunction::Exponential { .. } => decay_weight(decay, now.max(1), now.max(1))?,
    };
    points
        .iter()
        .map(|wp| {
            let w = decay_weight(decay, wp.arrival, now)?;
            let factor = match decay {
                DecayFunction::Polynomial { .. } => w,
                DecayFunction::Exponential { .. } => (w - reference).exp2(),
            };
            Ok(WeightedPoint {
                weight: wp.weight * factor,
                ..wp.clone()
            })
        })
        .collect()
}

/// Exact decayed cost of `centers` at time `now`. For exponential decay the
/// value is relative to the weight of an item arriving at `now`.
pub fn exact_decayed_cost(
    points: &[WeightedPoint],
    decay: DecayFunction,
    now: u64,
    cost: CostFunction,
    centers: &[Point],
) -> Result<f64> {
    let weighted = materialize_weights(points, decay, now)?;
    weighted_cost(&weighted, cost, centers)
}

/// Optimal discrete clustering: best k-subset of the distinct input
/// locations. Refuses when more than [`COMBINATORIAL_BUDGET`] subsets exist.
pub fn exhaustive_kmedian(points: &[WeightedPoint], cost: CostFunction, k: usize) -> Result<(Vec<Point>, f64)> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let locs = merge_duplicates(points);
    if locs.is_empty() {
        return Err(Error::Empty("exhaustive input"));
    }
    if k >= locs.len() {
        return Ok((locs.into_iter().map(|wp| wp.point).collect(), 0.0));
    }
    let count = binomial(locs.len(), k);
    if count > COMBINATORIAL_BUDGET {
        return Err(Error::BudgetExceeded {
            candidates: count,
            budget: COMBINATORIAL_BUDGET,
        });
    }
    let n = locs.len();
    // Column j holds every point's weighted cost to location j.
    let matrix: Vec<f64> = (0..n)
        .flat_map(|j| {
            let locs = &locs;
            (0..n).map(move |i| locs[i].weight * cost.cost(&locs[i].point, &locs[j].point))
        })
        .collect();
    let mut best_cost = f64::INFINITY;
    let mut best_idx: Vec<usize> = Vec::new();
    let mut buf = vec![0.0; n];
    for_each_subset(n, k, |idx| {
        buf.copy_from_slice(&matrix[idx[0] * n..(idx[0] + 1) * n]);
        for &j in &idx[1..] {
            for (b, m) in buf.iter_mut().zip(&matrix[j * n..(j + 1) * n]) {
                if *m < *b {
                    *b = *m;
                }
            }
        }
        let total: f64 = buf.iter().sum();
        if total < best_cost {
            best_cost = total;
            best_idx = idx.to_vec();
        }
    });
    let centers: Vec<Point> = best_idx.iter().map(|&i| locs[i].point.clone()).collect();
    // Report the cost in the same summation order as `weighted_cost`.
    let opt = weighted_cost(points, cost, &centers)?;
    Ok((centers, opt))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoresetReport {
    /// Largest `|cost(coreset) / cost(reference) - 1|` over the grid.
    pub max_rel_error: f64,
    pub pass: bool,
    pub candidates: usize,
    /// Grid index attaining `max_rel_error`.
    pub worst_candidate: usize,
}

/// Checks `(1-eps) ref(q) <= coreset(q) <= (1+eps) ref(q)` on every grid
/// candidate, with [`RATIO_SLACK`] added to `eps`.
pub fn verify_coreset(
    coreset: &[WeightedPoint],
    reference: &[WeightedPoint],
    cost: CostFunction,
    grid: &QueryGrid,
    epsilon: f64,
) -> Result<CoresetReport> {
    if grid.is_empty() {
        return Err(Error::Empty("query grid"));
    }
    let errors: Vec<f64> = grid
        .candidates
        .par_iter()
        .map(|centers| {
            let r = weighted_cost(reference, cost, centers)?;
            let c = weighted_cost(coreset, cost, centers)?;
            Ok(if r > 0.0 {
                (c / r - 1.0).abs()
            } else if c == 0.0 {
                0.0
            } else {
                f64::INFINITY
            })
        })
        .collect::<Result<_>>()?;
    let (worst_candidate, max_rel_error) = errors
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, e)| if e > acc.1 { (i, e) } else { acc });
    Ok(CoresetReport {
        max_rel_error,
        pass: max_rel_error <= epsilon + RATIO_SLACK,
        candidates: errors.len(),
        worst_candidate,
    })
}
