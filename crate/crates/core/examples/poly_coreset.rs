//! Polynomial-decay coreset over a drifting stream.
//!
//! Feeds 2000 points into a sketch, prints the block layout, then checks the
//! queried coreset against exact decayed costs on 100 sampled center sets.
//!
//! ```bash
//! cargo run --example poly_coreset
//! ```

use decaystream::harness::{Generator, StreamSpec};
use decaystream::metric::{CostFunction, DecayFunction, WeightedPoint};
use decaystream::oracle::{materialize_weights, verify_coreset, QueryGrid};
use decaystream::polydecay::{block_weight, PolyConfig, PolyDecaySketch};

fn main() -> decaystream::Result<()> {
    let (s, eps, k) = (1.0, 0.3, 3);
    let gen = Generator::GaussianClusters { clusters: k, spread: 4.0, drift: 0.02 };
    let stream = StreamSpec::new(gen, 2000, 2, 100.0).generate(1)?;

    let cfg = PolyConfig::new(s, eps, k);
    let mut sketch = PolyDecaySketch::new(cfg.clone())?;
    for p in &stream {
        sketch.insert(p.clone())?;
    }

    let n = sketch.len();
    println!("n = {n}, blocks = {} (bound {:.1})", sketch.block_count(), cfg.block_count_bound(n));
    println!("{:>6} {:>6} {:>5} {:>8} {:>12}", "start", "end", "level", "entries", "weight");
    for b in sketch.blocks() {
        let u = block_weight(n - b.end + 1, n - b.start + 1, s, eps);
        println!("{:>6} {:>6} {:>5} {:>8} {:>12.6}", b.start, b.end, b.level, b.summary.len(), u);
    }

    let coreset = sketch.query();
    let unit: Vec<WeightedPoint> = stream.iter().enumerate().map(|(i, p)| WeightedPoint::unit(p.clone(), i as u64 + 1)).collect();
    let exact = materialize_weights(&unit, DecayFunction::Polynomial { s }, n)?;
    let grid = QueryGrid::sampled_subsets(&stream, k, 100, 7)?;
    let report = verify_coreset(&coreset.entries, &exact, CostFunction::KMedian, &grid, eps)?;
    println!(
        "coreset: {} points, total weight {:.4}; max relative error {:.4} over {} queries ({})",
        coreset.len(),
        coreset.total_weight(),
        report.max_rel_error,
        report.candidates,
        if report.pass { "pass" } else { "FAIL" }
    );
    Ok(())
}
