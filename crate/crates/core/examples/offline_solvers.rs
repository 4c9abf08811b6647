//! The offline building blocks: D² seeding, sensitivity-sampled coresets and
//! single-swap local search.
//!
//! ```bash
//! cargo run --example offline_solvers
//! ```

use decaystream::harness::{Generator, StreamSpec};
use decaystream::metric::{weighted_cost, CostFunction, WeightedPoint};
use decaystream::offline::{cs_ram, d2_seeding, km_ram, size_budget, CsRamConfig, ALPHA};
use decaystream::oracle::{verify_coreset, QueryGrid};

fn main() -> decaystream::Result<()> {
    let k = 4;
    let gen = Generator::GaussianClusters { clusters: k, spread: 3.0, drift: 0.0 };
    let pts = StreamSpec::new(gen, 5000, 2, 200.0).generate(11)?;
    let input: Vec<WeightedPoint> = pts.iter().enumerate().map(|(i, p)| WeightedPoint::unit(p.clone(), i as u64 + 1)).collect();

    for cost in [CostFunction::KMedian, CostFunction::KMeans, CostFunction::Huber { threshold: 2.0 }] {
        let seeds = d2_seeding(&input, cost, k, 0)?;
        let seeded = weighted_cost(&input, cost, &seeds)?;

        let eps = 0.2;
        let budget = size_budget(input.len(), k, 2, eps, &CsRamConfig::default());
        let coreset = cs_ram(&input, cost, k, eps, 0)?;
        let grid = QueryGrid::sampled_subsets(&pts, k, 100, 1)?;
        let report = verify_coreset(&coreset.entries, &input, cost, &grid, eps)?;

        // Solve on the coreset, then score on the full input.
        let sol = km_ram(&coreset.entries, cost, k, 0)?;
        let full = weighted_cost(&input, cost, &sol.centers)?;

        println!("{}:", cost.name());
        println!("  D² seeding cost      {seeded:.1}");
        println!("  coreset              {} of {} points (budget {budget}), max error {:.4}", coreset.len(), input.len(), report.max_rel_error);
        println!("  local search         {} swaps, cost on coreset {:.1}, on input {full:.1}", sol.swaps, sol.lambda_cost);
    }
    println!("local search is documented as a {ALPHA}-approximation");
    Ok(())
}
