//! Seeded experiments over synthetic streams, with per-seed metrics and an
//! optional brute-force cross-check of every row.

mod generators;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use generators::{AdversarialKind, Generator, StreamSpec};

use crate::error::{Error, Result};
use crate::expdecay::{ExpDecayClusterer, StreamConfig};
use crate::metric::{decay_weight, weighted_cost, DecayFunction, Point, WeightedPoint};
use crate::offline::km_ram;
use crate::oracle::{exact_decayed_cost, exhaustive_kmedian, materialize_weights, verify_coreset, QueryGrid};
use crate::polydecay::{PolyConfig, PolyDecaySketch};

/// Candidate center sets sampled when checking a poly row's coreset.
pub const CORESET_GRID_SIZE: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub enum Algorithm {
    Poly(PolyConfig),
    Exp(StreamConfig),
}

impl Algorithm {
    fn k(&self) -> usize {
        match self {
            Algorithm::Poly(c) => c.k,
            Algorithm::Exp(c) => c.k,
        }
    }

    fn decay(&self) -> DecayFunction {
        match self {
            Algorithm::Poly(c) => DecayFunction::Polynomial { s: c.s },
            Algorithm::Exp(c) => DecayFunction::Exponential { half_life: c.half_life },
        }
    }
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub stream: StreamSpec,
    pub algorithm: Algorithm,
    pub seeds: Vec<u64>,
    /// Cross-check rows against the brute-force oracle.
    pub oracle: bool,
    /// Record per-update wall-clock time. Off by default so rows are
    /// reproducible byte for byte.
    pub timing: bool,
    pub metrics_out: Option<PathBuf>,
}

impl Experiment {
    pub fn new(stream: StreamSpec, algorithm: Algorithm, seeds: Vec<u64>) -> Self {
        Experiment {
            stream,
            algorithm,
            seeds,
            oracle: false,
            timing: false,
            metrics_out: None,
        }
    }
}

/// One seed's measurements. Costs are decayed costs at the end of the
/// stream; for exponential decay they are relative to the newest item's
/// weight.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub seed: u64,
    pub n: u64,
    pub stored_points: usize,
    /// Median nanoseconds per insert.
    pub update_ns: Option<u64>,
    pub final_cost: Option<f64>,
    pub oracle_opt: Option<f64>,
    pub ratio: Option<f64>,
    /// Largest relative coreset error over the sampled query grid (poly).
    pub coreset_error: Option<f64>,
    pub phase_count: Option<usize>,
    pub block_count: Option<usize>,
    pub error: Option<String>,
}

fn median(mut xs: Vec<u64>) -> Option<u64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_unstable();
    Some(xs[xs.len() / 2])
}

/// Decayed weights at the end of the stream via [`decay_weight`], the
/// route the algorithms use; the oracle recomputes through
/// [`exact_decayed_cost`].
fn stream_weights(stream: &[Point], decay: DecayFunction) -> Result<Vec<WeightedPoint>> {
    let n = stream.len() as u64;
    let top = match decay {
        DecayFunction::Exponential { .. } => decay_weight(decay, n, n)?,
        DecayFunction::Polynomial { .. } => 0.0,
    };
    stream
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let t = i as u64 + 1;
            let w = decay_weight(decay, t, n)?;
            let w = match decay {
                DecayFunction::Polynomial { .. } => w,
                DecayFunction::Exponential { .. } => (w - top).exp2(),
            };
            Ok(WeightedPoint::new(p.clone(), w, t))
        })
        .collect()
}

struct RunOutput {
    row: MetricsRow,
    centers: Vec<Point>,
}

fn run_poly(cfg: &PolyConfig, stream: &[Point], seed: u64, timing: bool) -> Result<RunOutput> {
    let mut cfg = cfg.clone();
    cfg.seed = seed;
    let mut sketch = PolyDecaySketch::new(cfg.clone())?;
    let mut times = Vec::with_capacity(if timing { stream.len() } else { 0 });
    for p in stream {
        let start = timing.then(Instant::now);
        sketch.insert(p.clone())?;
        if let Some(s) = start {
            times.push(s.elapsed().as_nanos() as u64);
        }
    }
    let coreset = sketch.query();
    let km = km_ram(&coreset.entries, cfg.cost, cfg.k, seed)?;
    let weighted = stream_weights(stream, DecayFunction::Polynomial { s: cfg.s })?;
    let final_cost = weighted_cost(&weighted, cfg.cost, &km.centers)?;
    Ok(RunOutput {
        row: MetricsRow {
            seed,
            n: sketch.len(),
            stored_points: sketch.stored_points(),
            update_ns: median(times),
            final_cost: Some(final_cost),
            block_count: Some(sketch.block_count()),
            ..Default::default()
        },
        centers: km.centers,
    })
}

fn run_exp(cfg: &StreamConfig, stream: &[Point], seed: u64, timing: bool) -> Result<RunOutput> {
    let mut cfg = cfg.clone();
    cfg.seed = seed;
    let mut clusterer = ExpDecayClusterer::new(cfg.clone())?;
    let mut times = Vec::with_capacity(if timing { stream.len() } else { 0 });
    for p in stream {
        let start = timing.then(Instant::now);
        clusterer.insert(p.clone())?;
        if let Some(s) = start {
            times.push(s.elapsed().as_nanos() as u64);
        }
    }
    let result = clusterer.finish()?;
    let weighted = stream_weights(stream, DecayFunction::Exponential { half_life: cfg.half_life })?;
    let final_cost = weighted_cost(&weighted, cfg.cost, &result.centers)?;
    Ok(RunOutput {
        row: MetricsRow {
            seed,
            n: clusterer.len(),
            stored_points: clusterer.peak_stored(),
            update_ns: median(times),
            final_cost: Some(final_cost),
            phase_count: Some(result.phase_count),
            ..Default::default()
        },
        centers: result.centers,
    })
}

fn run_seed(e: &Experiment, seed: u64) -> MetricsRow {
    let stream = match e.stream.generate(seed) {
        Ok(s) => s,
        Err(err) => {
            return MetricsRow {
                seed,
                error: Some(format!("generator: {err}")),
                ..Default::default()
            }
        }
    };
    let out = match &e.algorithm {
        Algorithm::Poly(cfg) => run_poly(cfg, &stream, seed, e.timing),
        Algorithm::Exp(cfg) => run_exp(cfg, &stream, seed, e.timing),
    };
    let RunOutput { mut row, centers } = match out {
        Ok(o) => o,
        Err(err) => {
            return MetricsRow {
                seed,
                n: stream.len() as u64,
                error: Some(err.to_string()),
                ..Default::default()
            }
        }
    };
    if e.oracle {
        if let Err(err) = oracle_check(e, &stream, &centers, seed, &mut row) {
            row.error = Some(format!("oracle: {err}"));
        }
    }
    row
}

fn oracle_check(e: &Experiment, stream: &[Point], centers: &[Point], seed: u64, row: &mut MetricsRow) -> Result<()> {
    let decay = e.algorithm.decay();
    let cost = match &e.algorithm {
        Algorithm::Poly(c) => c.cost,
        Algorithm::Exp(c) => c.cost,
    };
    let n = stream.len() as u64;
    let unit: Vec<WeightedPoint> = stream.iter().enumerate().map(|(i, p)| WeightedPoint::unit(p.clone(), i as u64 + 1)).collect();
    let recomputed = exact_decayed_cost(&unit, decay, n, cost, centers)?;
    let reported = row.final_cost.unwrap_or(f64::NAN);
    if (reported - recomputed).abs() > 1e-9 * recomputed.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::param(format!("final cost {reported} disagrees with recomputation {recomputed}")));
    }
    let weighted = materialize_weights(&unit, decay, n)?;
    if let Algorithm::Poly(cfg) = &e.algorithm {
        let mut c = cfg.clone();
        c.seed = seed;
        let mut sketch = PolyDecaySketch::new(c)?;
        for p in stream {
            sketch.insert(p.clone())?;
        }
        let grid = QueryGrid::sampled_subsets(stream, cfg.k, CORESET_GRID_SIZE, seed)?;
        let report = verify_coreset(&sketch.query().entries, &weighted, cost, &grid, cfg.epsilon)?;
        row.coreset_error = Some(report.max_rel_error);
    }
    let (_, opt) = exhaustive_kmedian(&weighted, cost, e.algorithm.k())?;
    row.oracle_opt = Some(opt);
    row.ratio = Some(if opt > 0.0 {
        recomputed / opt
    } else if recomputed == 0.0 {
        1.0
    } else {
        f64::INFINITY
    });
    Ok(())
}

/// Runs every seed (in parallel) and returns rows in seed order. Per-row
/// failures are recorded in [`MetricsRow::error`]; the run continues.
pub fn run_experiment(e: &Experiment) -> Result<Vec<MetricsRow>> {
    if e.seeds.is_empty() {
        return Err(Error::param("an experiment needs at least one seed"));
    }
    e.stream.validate()?;
    let rows: Vec<MetricsRow> = e.seeds.par_iter().map(|&seed| run_seed(e, seed)).collect();
    if let Some(path) = &e.metrics_out {
        let file = std::fs::File::create(path)?;
        write_metrics_csv(&rows, file)?;
    }
    Ok(rows)
}

/// CSV with a header row of the [`MetricsRow`] field names.
pub fn write_metrics_csv<W: Write>(rows: &[MetricsRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares line `stored = slope * log2(size) + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

/// Fits stored points against the base-2 log of a size variable. Needs at
/// least four distinct positive sizes.
pub fn fit_space_curve(samples: &[(f64, f64)]) -> Result<SpaceFit> {
    let mut sizes: Vec<f64> = samples.iter().map(|s| s.0).collect();
    if sizes.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::param("sizes must be positive and finite"));
    }
    sizes.sort_by(f64::total_cmp);
    sizes.dedup();
    if sizes.len() < 4 {
        return Err(Error::param(format!("need at least 4 distinct sizes, got {}", sizes.len())));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.log2()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    Ok(SpaceFit {
        slope,
        intercept,
        residual: (sse / n).sqrt(),
    })
}
