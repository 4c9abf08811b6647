use serde::{Deserialize, Serialize};

use super::{d2_seeding, merge_duplicates};
use crate::error::{Error, Result};
use crate::metric::{weighted_cost, CostFunction, Point, WeightedPoint};

/// Approximation factor certified for single-swap local search on k-median.
pub const ALPHA: f64 = 5.0;

/// A swap is accepted only if it lowers the cost below `(1 - SWAP_TOL)` times
/// the current cost.
pub const SWAP_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KmConfig {
    pub swap_tol: f64,
}

impl Default for KmConfig {
    fn default() -> Self {
        KmConfig { swap_tol: SWAP_TOL }
    }
}

/// Centers chosen among the input points and their exact weighted cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KmResult {
    pub centers: Vec<Point>,
    pub lambda_cost: f64,
    /// Accepted swaps before reaching a local optimum.
    pub swaps: usize,
}

pub fn km_ram(points: &[WeightedPoint], cost: CostFunction, k: usize, seed: u64) -> Result<KmResult> {
    km_ram_with(points, cost, k, seed, &KmConfig::default())
}

/// Weighted k-median (or the given cost) by single-swap local search over the
/// distinct input locations, started from D^2 seeds.
pub fn km_ram_with(points: &[WeightedPoint], cost: CostFunction, k: usize, seed: u64, cfg: &KmConfig) -> Result<KmResult> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    if points.is_empty() {
        return Err(Error::Empty("k-median input"));
    }
    let pts = merge_duplicates(points);
    if pts.is_empty() {
        return Err(Error::Empty("k-median input has no positive weight"));
    }
    if k >= pts.len() {
        return Ok(KmResult {
            centers: pts.into_iter().map(|wp| wp.point).collect(),
            lambda_cost: 0.0,
            swaps: 0,
        });
    }

    let seeds = d2_seeding(&pts, cost, k, seed)?;
    let mut chosen: Vec<usize> = seeds
        .iter()
        .map(|s| pts.iter().position(|wp| wp.point == *s).expect("seed drawn from input"))
        .collect();
    let mut is_center = vec![false; pts.len()];
    for &c in &chosen {
        is_center[c] = true;
    }

    let mut swaps = 0;
    let mut cache = Assignment::build(&pts, cost, &chosen);
    loop {
        let current = cache.total(&pts);
        if current <= 0.0 {
            break;
        }
        let mut best: Option<(usize, usize, f64)> = None;
        for (slot, _) in chosen.iter().enumerate() {
            for cand in 0..pts.len() {
                if is_center[cand] {
                    continue;
                }
                let c = cache.swap_cost(&pts, cost, slot, cand);
                if best.is_none_or(|(_, _, b)| c < b) {
                    best = Some((slot, cand, c));
                }
            }
        }
        match best {
            Some((slot, cand, c)) if c < (1.0 - cfg.swap_tol) * current => {
                is_center[chosen[slot]] = false;
                is_center[cand] = true;
                chosen[slot] = cand;
                cache = Assignment::build(&pts, cost, &chosen);
                swaps += 1;
            }
            _ => break,
        }
    }

    let centers: Vec<Point> = chosen.iter().map(|&i| pts[i].point.clone()).collect();
    let lambda_cost = weighted_cost(points, cost, &centers)?;
    Ok(KmResult {
        centers,
        lambda_cost,
        swaps,
    })
}

/// Per point: slot of the nearest center, its cost, and the cost of the
/// second nearest.
struct Assignment {
    slot: Vec<usize>,
    first: Vec<f64>,
    second: Vec<f64>,
}

impl Assignment {
    fn build(pts: &[WeightedPoint], cost: CostFunction, chosen: &[usize]) -> Self {
        let mut slot = Vec::with_capacity(pts.len());
        let mut first = Vec::with_capacity(pts.len());
        let mut second = Vec::with_capacity(pts.len());
        for wp in pts {
            let (mut s, mut a, mut b) = (0, f64::INFINITY, f64::INFINITY);
            for (j, &c) in chosen.iter().enumerate() {
                let v = cost.cost(&wp.point, &pts[c].point);
                if v < a {
                    b = a;
                    a = v;
                    s = j;
                } else if v < b {
                    b = v;
                }
            }
            slot.push(s);
            first.push(a);
            second.push(b);
        }
        Assignment { slot, first, second }
    }

    fn total(&self, pts: &[WeightedPoint]) -> f64 {
        pts.iter().zip(&self.first).map(|(wp, c)| wp.weight * c).sum()
    }

    /// Cost after replacing the center in `slot` with point `cand`.
    fn swap_cost(&self, pts: &[WeightedPoint], cost: CostFunction, slot: usize, cand: usize) -> f64 {
        let target = &pts[cand].point;
        pts.iter()
            .enumerate()
            .map(|(i, wp)| {
                let keep = if self.slot[i] == slot { self.second[i] } else { self.first[i] };
                wp.weight * keep.min(cost.cost(&wp.point, target))
            })
            .sum()
    }
}
