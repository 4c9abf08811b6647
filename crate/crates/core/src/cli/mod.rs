//! Command-line front end: `poly`, `exp`, `verify` and `bench`.
//!
//! Input is one point per row, either CSV (comma-separated coordinates) or
//! JSONL (`{"coords": [...]}`). Row order defines arrival time. Outputs are
//! JSON or JSONL except `bench`, which writes the metrics CSV.

mod ingest;

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use ingest::{ingest, read_weighted, Ingest};

use crate::error::{Error, Result};
use crate::expdecay::{amplification_for, ExpDecayClusterer, ExpResult, StreamConfig, DEFAULT_BETA, DEFAULT_GAMMA};
use crate::harness::{run_experiment, write_metrics_csv, AdversarialKind, Algorithm, Experiment, Generator, StreamSpec};
use crate::metric::{CostFunction, DecayFunction, Point, WeightedPoint};
use crate::offline::{Coreset, DEFAULT_DELTA};
use crate::oracle::{materialize_weights, verify_coreset, CoresetReport, QueryGrid};
use crate::polydecay::{PolyConfig, PolyDecaySketch, DEFAULT_N_MAX};

/// Environment variable that overrides `--seed`.
pub const SEED_ENV: &str = "DECAYSTREAM_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CostArg {
    Kmedian,
    Kmeans,
    Huber,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GeneratorArg {
    Gaussian,
    Uniform,
    Alternating,
    LateShift,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Poly,
    Exp,
}

#[derive(Parser, Debug)]
#[command(name = "decaystream", version, about = "Clustering and coresets over time-decayed streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Maintain a polynomial-decay coreset and print it as JSONL.
    Poly(PolyArgs),
    /// Exponential-decay k-median; prints centers, log2 cost and phase count.
    Exp(ExpArgs),
    /// Check a weighted coreset against the exact decayed stream.
    Verify(VerifyArgs),
    /// Run a seeded synthetic experiment and print the metrics CSV.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
struct IoArgs {
    /// Input path; `-` or absent reads stdin.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Input format. Inferred from the extension when absent (default csv).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output path; absent writes stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = CostArg::Kmedian)]
    cost: CostArg,
    /// Threshold for the Huber cost.
    #[arg(long, default_value_t = 1.0)]
    huber_threshold: f64,
}

#[derive(Args, Debug, Clone)]
struct PolyParams {
    /// Decay exponent: the a-th most recent item weighs a^-s.
    #[arg(long)]
    s: f64,
    #[arg(long, default_value_t = 0.3)]
    epsilon: f64,
    /// Upper bound on stream length used to size the reduce accuracy.
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    n_max: u64,
    /// Accuracy for per-block reduction, overriding the derived one.
    #[arg(long)]
    reduce_epsilon: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct ExpParams {
    /// Half-life in items.
    #[arg(long)]
    h: f64,
    /// Upper bound on the aspect ratio (max distance over min nonzero distance, normalized to 1).
    #[arg(long)]
    delta_aspect: f64,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    gamma: f64,
    /// Failure probability; sets the number of parallel instances.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
}

#[derive(Args, Debug)]
struct PolyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    params: PolyParams,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args, Debug)]
struct ExpArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    params: ExpParams,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Weighted coreset as JSONL (`coords`, `weight`).
    #[arg(long)]
    coreset: PathBuf,
    #[arg(long)]
    k: usize,
    /// Polynomial decay exponent of the reference stream.
    #[arg(long, conflicts_with = "h", required_unless_present = "h")]
    s: Option<f64>,
    /// Exponential half-life of the reference stream; weights are taken
    /// relative to the newest item.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long, default_value_t = 0.3)]
    epsilon: f64,
    /// Number of sampled k-subsets of the stream to test.
    #[arg(long, default_value_t = 100)]
    grid_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = CostArg::Kmedian)]
    cost: CostArg,
    #[arg(long, default_value_t = 1.0)]
    huber_threshold: f64,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_enum)]
    algo: AlgoArg,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    n_max: Option<u64>,
    #[arg(long)]
    reduce_epsilon: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    delta_aspect: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = GeneratorArg::Gaussian)]
    generator: GeneratorArg,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Coordinate range for poly streams; exp streams derive it from the aspect bound.
    #[arg(long, default_value_t = 100.0)]
    extent: f64,
    /// Gaussian clusters; defaults to k.
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long, default_value_t = 4.0)]
    spread: f64,
    #[arg(long, default_value_t = 0.0)]
    drift: f64,
    /// First seed; runs use consecutive seeds.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    runs: u64,
    /// Cross-check each row with the brute-force oracle.
    #[arg(long)]
    oracle: bool,
    /// Record median update time (makes output nondeterministic).
    #[arg(long)]
    timing: bool,
    #[arg(long, value_enum, default_value_t = CostArg::Kmedian)]
    cost: CostArg,
    #[arg(long, default_value_t = 1.0)]
    huber_threshold: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Where points come from.
#[derive(Clone, Debug, PartialEq)]
pub struct Input {
    /// `None` reads stdin.
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// A validated invocation.
#[derive(Clone, Debug)]
pub enum CliConfig {
    Poly { config: PolyConfig, input: Input, output: Option<PathBuf> },
    Exp { config: StreamConfig, input: Input, output: Option<PathBuf> },
    Verify {
        coreset: PathBuf,
        decay: DecayFunction,
        cost: CostFunction,
        k: usize,
        epsilon: f64,
        grid_size: usize,
        seed: u64,
        input: Input,
        output: Option<PathBuf>,
    },
    Bench { experiment: Experiment, output: Option<PathBuf> },
}

/// A parse failure. `Help` carries clap's help or version text.
#[derive(Debug)]
pub enum ParseError {
    Help(String),
    Usage(String),
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseError::Help(s) | ParseError::Usage(s) => f.write_str(s),
        }
    }
}

fn cost_of(c: CostArg, threshold: f64) -> CostFunction {
    match c {
        CostArg::Kmedian => CostFunction::KMedian,
        CostArg::Kmeans => CostFunction::KMeans,
        CostArg::Huber => CostFunction::Huber { threshold },
    }
}

fn input_of(io: &IoArgs) -> Input {
    let path = io.input.clone().filter(|p| p.as_os_str() != "-");
    let format = io.format.unwrap_or_else(|| match path.as_deref().and_then(Path::extension) {
        Some(ext) if ext == "jsonl" || ext == "json" => Format::Jsonl,
        _ => Format::Csv,
    });
    Input { path, format }
}

fn env_seed(raw: Option<&str>) -> std::result::Result<Option<u64>, ParseError> {
    raw.map(|s| s.trim().parse::<u64>().map_err(|_| ParseError::Usage(format!("{SEED_ENV} must be an unsigned integer, got {s:?}"))))
        .transpose()
}

fn poly_config(common: &Common, p: &PolyParams, seed: u64) -> PolyConfig {
    let mut cfg = PolyConfig::new(p.s, p.epsilon, common.k);
    cfg.cost = cost_of(common.cost, common.huber_threshold);
    cfg.n_max = p.n_max;
    cfg.reduce_epsilon = p.reduce_epsilon;
    cfg.seed = seed;
    cfg
}

fn exp_config(common: &Common, p: &ExpParams, seed: u64) -> Result<StreamConfig> {
    if !(p.delta > 0.0 && p.delta < 1.0) {
        return Err(Error::param(format!("delta must be in (0,1), got {}", p.delta)));
    }
    let mut cfg = StreamConfig::new(common.k, p.h, p.delta_aspect);
    cfg.beta = p.beta;
    cfg.gamma = p.gamma;
    cfg.amplification = amplification_for(p.delta);
    cfg.cost = cost_of(common.cost, common.huber_threshold);
    cfg.seed = seed;
    Ok(cfg)
}

fn bench_config(b: &BenchArgs, seed: u64) -> Result<Experiment> {
    let common = Common { k: b.k, seed, cost: b.cost, huber_threshold: b.huber_threshold };
    let (algorithm, exp_delta) = match b.algo {
        AlgoArg::Poly => {
            for (flag, set) in [("--h", b.h.is_some()), ("--delta-aspect", b.delta_aspect.is_some()), ("--beta", b.beta.is_some()), ("--gamma", b.gamma.is_some()), ("--delta", b.delta.is_some())] {
                if set {
                    return Err(Error::param(format!("{flag} does not apply to --algo poly")));
                }
            }
            let s = b.s.ok_or_else(|| Error::param("--algo poly requires --s"))?;
            let p = PolyParams { s, epsilon: b.epsilon.unwrap_or(0.3), n_max: b.n_max.unwrap_or(DEFAULT_N_MAX), reduce_epsilon: b.reduce_epsilon };
            let cfg = poly_config(&common, &p, seed);
            cfg.validate()?;
            (Algorithm::Poly(cfg), None)
        }
        AlgoArg::Exp => {
            for (flag, set) in [("--s", b.s.is_some()), ("--epsilon", b.epsilon.is_some()), ("--n-max", b.n_max.is_some()), ("--reduce-epsilon", b.reduce_epsilon.is_some())] {
                if set {
                    return Err(Error::param(format!("{flag} does not apply to --algo exp")));
                }
            }
            let h = b.h.ok_or_else(|| Error::param("--algo exp requires --h"))?;
            let delta_aspect = b.delta_aspect.ok_or_else(|| Error::param("--algo exp requires --delta-aspect"))?;
            let p = ExpParams {
                h,
                delta_aspect,
                beta: b.beta.unwrap_or(DEFAULT_BETA),
                gamma: b.gamma.unwrap_or(DEFAULT_GAMMA),
                delta: b.delta.unwrap_or(DEFAULT_DELTA),
            };
            let cfg = exp_config(&common, &p, seed)?;
            cfg.validate()?;
            (Algorithm::Exp(cfg), Some(delta_aspect))
        }
    };
    let generator = match b.generator {
        GeneratorArg::Gaussian => Generator::GaussianClusters { clusters: b.clusters.unwrap_or(b.k), spread: b.spread, drift: b.drift },
        GeneratorArg::Uniform => Generator::UniformBox,
        GeneratorArg::Alternating => Generator::Adversarial(AdversarialKind::AlternatingExtremes),
        GeneratorArg::LateShift => Generator::Adversarial(AdversarialKind::LateShift),
    };
    let stream = match exp_delta {
        Some(delta) => StreamSpec::with_aspect_bound(generator, b.n, b.dim, delta),
        None => StreamSpec::new(generator, b.n, b.dim, b.extent),
    };
    stream.validate()?;
    if b.runs == 0 {
        return Err(Error::param("--runs must be at least 1"));
    }
    let seeds = (0..b.runs).map(|i| seed.wrapping_add(i)).collect();
    let mut e = Experiment::new(stream, algorithm, seeds);
    e.oracle = b.oracle;
    e.timing = b.timing;
    Ok(e)
}

/// Parses and validates `argv` (including the program name). `env_seed` is
/// the raw value of `DECAYSTREAM_SEED`, which wins over `--seed`.
pub fn parse_args<I, T>(argv: I, env_seed_raw: Option<&str>) -> std::result::Result<CliConfig, ParseError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ParseError::Help(e.to_string()),
        _ => ParseError::Usage(e.to_string()),
    })?;
    let env = env_seed(env_seed_raw)?;
    let usage = |e: Error| ParseError::Usage(format!("error: {e}"));
    let cfg = match cli.command {
        Command::Poly(a) => {
            let config = poly_config(&a.common, &a.params, env.unwrap_or(a.common.seed));
            config.validate().map_err(usage)?;
            CliConfig::Poly { config, input: input_of(&a.io), output: a.io.output.clone() }
        }
        Command::Exp(a) => {
            let config = exp_config(&a.common, &a.params, env.unwrap_or(a.common.seed)).map_err(usage)?;
            config.validate().map_err(usage)?;
            CliConfig::Exp { config, input: input_of(&a.io), output: a.io.output.clone() }
        }
        Command::Verify(a) => {
            let decay = match (a.s, a.h) {
                (Some(s), None) => DecayFunction::polynomial(s),
                (None, Some(h)) => DecayFunction::exponential(h),
                _ => return Err(ParseError::Usage("error: exactly one of --s and --h is required".into())),
            }
            .map_err(usage)?;
            let cost = cost_of(a.cost, a.huber_threshold);
            cost.validate().map_err(usage)?;
            if a.k == 0 {
                return Err(usage(Error::param("k must be at least 1")));
            }
            if !(a.epsilon >= 0.0 && a.epsilon.is_finite()) {
                return Err(usage(Error::param(format!("epsilon must be finite and nonnegative, got {}", a.epsilon))));
            }
            if a.grid_size == 0 {
                return Err(usage(Error::param("--grid-size must be at least 1")));
            }
            CliConfig::Verify {
                coreset: a.coreset,
                decay,
                cost,
                k: a.k,
                epsilon: a.epsilon,
                grid_size: a.grid_size,
                seed: env.unwrap_or(a.seed),
                input: input_of(&a.io),
                output: a.io.output.clone(),
            }
        }
        Command::Bench(b) => {
            let experiment = bench_config(&b, env.unwrap_or(b.seed)).map_err(usage)?;
            CliConfig::Bench { experiment, output: b.output.clone() }
        }
    };
    Ok(cfg)
}

fn open_input(input: &Input) -> Result<Box<dyn BufRead>> {
    Ok(match &input.path {
        Some(p) => Box::new(BufReader::new(File::open(p)?)),
        None => Box::new(BufReader::new(io::stdin().lock())),
    })
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// One output line of a weighted point set.
#[derive(Serialize)]
struct WeightedRow<'a> {
    coords: &'a [f64],
    weight: f64,
}

#[derive(Serialize)]
struct ExpSummary<'a> {
    centers: Vec<&'a [f64]>,
    log2_cost: f64,
    phase_count: usize,
    instance: usize,
    n: u64,
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    pass: bool,
    max_rel_error: f64,
    epsilon: f64,
    candidates: usize,
    worst_candidate: Vec<&'a [f64]>,
}

/// Results the CLI knows how to print.
pub enum Outcome<'a> {
    Coreset(&'a Coreset),
    Exp(&'a ExpResult),
    Verify { report: &'a CoresetReport, epsilon: f64, grid: &'a QueryGrid },
}

/// Writes `outcome` to `out` and returns the exit code it implies.
pub fn emit_result<W: Write>(outcome: Outcome<'_>, mut out: W) -> Result<i32> {
    let code = match outcome {
        Outcome::Coreset(c) => {
            for wp in &c.entries {
                serde_json::to_writer(&mut out, &WeightedRow { coords: &wp.point.coords, weight: wp.weight }).map_err(json_err)?;
                out.write_all(b"\n")?;
            }
            EXIT_OK
        }
        Outcome::Exp(r) => {
            let s = ExpSummary {
                centers: r.centers.iter().map(|p| p.coords.as_slice()).collect(),
                log2_cost: r.log2_cost,
                phase_count: r.phase_count,
                instance: r.instance,
                n: r.n,
            };
            serde_json::to_writer(&mut out, &s).map_err(json_err)?;
            out.write_all(b"\n")?;
            EXIT_OK
        }
        Outcome::Verify { report, epsilon, grid } => {
            let worst = grid.candidates.get(report.worst_candidate).map(|c| c.iter().map(|p| p.coords.as_slice()).collect()).unwrap_or_default();
            let s = VerifySummary { pass: report.pass, max_rel_error: report.max_rel_error, epsilon, candidates: report.candidates, worst_candidate: worst };
            serde_json::to_writer(&mut out, &s).map_err(json_err)?;
            out.write_all(b"\n")?;
            if report.pass {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
    };
    out.flush()?;
    Ok(code)
}

fn json_err(e: serde_json::Error) -> Error {
    match e.io_error_kind() {
        Some(kind) => Error::Io(io::Error::new(kind, e)),
        None => Error::InvalidParameter(e.to_string()),
    }
}

/// Executes a validated invocation and returns the process exit code.
pub fn execute(cfg: CliConfig) -> Result<i32> {
    match cfg {
        CliConfig::Poly { config, input, output } => {
            let mut sketch = PolyDecaySketch::new(config)?;
            for p in ingest(open_input(&input)?, input.format) {
                sketch.insert(p?)?;
            }
            emit_result(Outcome::Coreset(&sketch.query()), open_output(&output)?)
        }
        CliConfig::Exp { config, input, output } => {
            let mut cl = ExpDecayClusterer::new(config)?;
            for p in ingest(open_input(&input)?, input.format) {
                cl.insert(p?)?;
            }
            emit_result(Outcome::Exp(&cl.finish()?), open_output(&output)?)
        }
        CliConfig::Verify { coreset, decay, cost, k, epsilon, grid_size, seed, input, output } => {
            let summary = read_weighted(BufReader::new(File::open(&coreset)?))?;
            let stream: Vec<Point> = ingest(open_input(&input)?, input.format).collect::<Result<_>>()?;
            if stream.is_empty() {
                return Err(Error::Empty("reference stream"));
            }
            let n = stream.len() as u64;
            let unit: Vec<WeightedPoint> = stream.iter().enumerate().map(|(i, p)| WeightedPoint::unit(p.clone(), i as u64 + 1)).collect();
            let reference = materialize_weights(&unit, decay, n)?;
            let grid = QueryGrid::sampled_subsets(&stream, k, grid_size, seed)?;
            let report = verify_coreset(&summary, &reference, cost, &grid, epsilon)?;
            emit_result(Outcome::Verify { report: &report, epsilon, grid: &grid }, open_output(&output)?)
        }
        CliConfig::Bench { experiment, output } => {
            let rows = run_experiment(&experiment)?;
            write_metrics_csv(&rows, open_output(&output)?)?;
            Ok(EXIT_OK)
        }
    }
}

/// Full entry point: parses `argv`, reads `DECAYSTREAM_SEED`, runs, and
/// reports errors on stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let env = std::env::var(SEED_ENV).ok();
    match parse_args(argv, env.as_deref()) {
        Ok(cfg) => match execute(cfg) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("decaystream: {e}");
                EXIT_ERROR
            }
        },
        Err(ParseError::Help(text)) => {
            print!("{text}");
            EXIT_OK
        }
        Err(ParseError::Usage(text)) => {
            eprint!("{text}");
            if !text.ends_with('\n') {
                eprintln!();
            }
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests;
