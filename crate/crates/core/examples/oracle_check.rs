//! Brute-force ground truth: exact decayed costs, exhaustive k-median and
//! coreset verification, including a deliberately broken summary.
//!
//! ```bash
//! cargo run --example oracle_check
//! ```

use decaystream::metric::{CostFunction, DecayFunction, Point, WeightedPoint};
use decaystream::oracle::{exact_decayed_cost, exhaustive_kmedian, materialize_weights, verify_coreset, QueryGrid};

fn main() -> decaystream::Result<()> {
    let xs = [0.0, 1.0, 2.0, 10.0, 11.0, 12.0, 30.0];
    let stream: Vec<WeightedPoint> = xs.iter().enumerate().map(|(i, &x)| WeightedPoint::unit(Point::from(vec![x]), i as u64 + 1)).collect();
    let now = stream.len() as u64;

    for decay in [DecayFunction::Polynomial { s: 1.0 }, DecayFunction::Exponential { half_life: 2.0 }] {
        let weighted = materialize_weights(&stream, decay, now)?;
        let (centers, opt) = exhaustive_kmedian(&weighted, CostFunction::KMedian, 2)?;
        let check = exact_decayed_cost(&stream, decay, now, CostFunction::KMedian, &centers)?;
        let at: Vec<f64> = centers.iter().map(|c| c.coords[0]).collect();
        println!("{decay:?}: optimum {opt:.4} with centers {at:?} (recomputed {check:.4})");

        let pts: Vec<Point> = stream.iter().map(|wp| wp.point.clone()).collect();
        let grid = QueryGrid::all_subsets(&pts, 2)?;
        let exact = verify_coreset(&weighted, &weighted, CostFunction::KMedian, &grid, 0.1)?;
        let mut broken = weighted.clone();
        broken[0].weight *= 2.0;
        let bad = verify_coreset(&broken, &weighted, CostFunction::KMedian, &grid, 0.1)?;
        println!(
            "  identity summary: error {:.3} pass={}; doubled oldest weight: error {:.3} pass={} (worst of {} queries: #{})",
            exact.max_rel_error, exact.pass, bad.max_rel_error, bad.pass, bad.candidates, bad.worst_candidate
        );
    }
    Ok(())
}
