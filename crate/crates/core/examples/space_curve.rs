//! Space against stream length (polynomial decay) and against the aspect
//! ratio (exponential decay), with least-squares fits against the log of
//! the size variable. Writes the metrics CSVs to the system temp dir.
//!
//! ```bash
//! cargo run --release --example space_curve
//! ```

use decaystream::expdecay::StreamConfig;
use decaystream::harness::{fit_space_curve, run_experiment, Algorithm, Experiment, Generator, StreamSpec};
use decaystream::polydecay::PolyConfig;

fn main() -> decaystream::Result<()> {
    let out = std::env::temp_dir();

    // With the default reduce accuracy every block is kept exactly at these
    // sizes; a coarser reduce shows the logarithmic shape.
    let mut poly = PolyConfig::new(1.0, 0.3, 2);
    poly.reduce_epsilon = Some(0.5);
    poly.coreset.sample_constant = 0.5;
    let mut samples = Vec::new();
    println!("{:>6} {:>8} {:>7}", "n", "stored", "blocks");
    for n in [250, 500, 1000, 2000, 4000, 8000] {
        let gen = Generator::GaussianClusters { clusters: 2, spread: 4.0, drift: 0.01 };
        let mut e = Experiment::new(StreamSpec::new(gen, n, 2, 100.0), Algorithm::Poly(poly.clone()), vec![1, 2, 3]);
        e.metrics_out = Some(out.join(format!("poly_space_{n}.csv")));
        let rows = run_experiment(&e)?;
        let stored = rows.iter().map(|r| r.stored_points as f64).sum::<f64>() / rows.len() as f64;
        let blocks = rows.iter().filter_map(|r| r.block_count).max().unwrap_or(0);
        println!("{n:>6} {stored:>8.1} {blocks:>7}");
        samples.push((n as f64, stored));
    }
    let fit = fit_space_curve(&samples)?;
    println!("poly: stored ≈ {:.1}·log2 n + {:.1} (rms residual {:.1})\n", fit.slope, fit.intercept, fit.residual);

    let mut samples = Vec::new();
    println!("{:>6} {:>6} {:>8}", "delta", "peak", "bound");
    for e in 4..=10 {
        let delta = 2f64.powi(e);
        let cfg = StreamConfig::new(2, 4.0, delta);
        let gen = Generator::GaussianClusters { clusters: 4, spread: delta / 16.0, drift: 0.0 };
        let mut ex = Experiment::new(StreamSpec::with_aspect_bound(gen, 1500, 2, delta), Algorithm::Exp(cfg.clone()), (0..5).collect());
        ex.metrics_out = Some(out.join(format!("exp_space_{e}.csv")));
        let rows = run_experiment(&ex)?;
        let peak = rows.iter().map(|r| r.stored_points).max().unwrap_or(0);
        println!("{delta:>6} {peak:>6} {:>8.1}", cfg.space_bound());
        samples.push((delta, peak as f64));
    }
    let fit = fit_space_curve(&samples)?;
    println!("exp: peak ≈ {:.1}·log2 Δ + {:.1} (rms residual {:.1})", fit.slope, fit.intercept, fit.residual);
    println!("metrics CSVs in {}", out.display());
    Ok(())
}
