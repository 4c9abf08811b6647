use decaystream::error::Error;
use decaystream::expdecay::{process_stream, ExpDecayClusterer, StreamConfig};
use decaystream::harness::{AdversarialKind, Generator, StreamSpec};
use decaystream::metric::Point;
use decaystream::offline::ALPHA;

fn stream(gen: Generator, n: usize, dim: usize, delta: f64, seed: u64) -> Vec<Point> {
    StreamSpec::with_aspect_bound(gen, n, dim, delta).generate(seed).unwrap()
}

fn gaussian() -> Generator {
    Generator::GaussianClusters { clusters: 3, spread: 10.0, drift: 0.1 }
}

#[test]
fn per_step_invariants_hold() {
    for (seed, h, delta) in [(0u64, 4.0, 256.0), (1, 8.0, 1024.0), (2, 2.5, 64.0)] {
        let mut cfg = StreamConfig::new(3, h, delta);
        cfg.seed = seed;
        let bound = cfg.space_bound();
        let log2_gamma = cfg.gamma.log2();
        let mut cl = ExpDecayClusterer::new(cfg.clone()).unwrap();
        let pts = stream(gaussian(), 1500, 2, delta, seed);
        let mut guesses: Vec<f64> = vec![f64::NEG_INFINITY; cfg.amplification];
        for p in pts {
            cl.insert(p).unwrap();
            for (i, inst) in cl.instances().iter().enumerate() {
                assert!(inst.stored() as f64 <= bound);
                assert!(inst.log2_running_cost() <= log2_gamma + inst.log2_guess() + 1e-9);
                assert!(inst.log2_guess() >= guesses[i]);
                guesses[i] = inst.log2_guess();
            }
        }
        assert!(cl.peak_stored() as f64 <= bound);
    }
}

/// Phase-count sanity bound at desk scale. On long streams the count grows
/// linearly, since every OFL sub-phase ends after a bounded number of reads.
#[test]
fn phase_count_stays_logarithmic_at_desk_scale() {
    for seed in 0..20u64 {
        let h = if seed % 2 == 0 { 4.0 } else { 8.0 };
        let dim = 1 + (seed / 2 % 2) as usize;
        let mut cfg = StreamConfig::new(2, h, 1024.0);
        cfg.seed = seed;
        let mut cl = ExpDecayClusterer::new(cfg.clone()).unwrap();
        for p in stream(gaussian(), 300, dim, 1024.0, seed) {
            cl.insert(p).unwrap();
        }
        let cap = (ALPHA * 300.0 * cfg.log2_w().exp2() * cfg.delta_aspect).log2() / cfg.beta.log2();
        for inst in cl.instances() {
            assert!((inst.phase_count() as f64) <= cap, "seed {seed}: {} phases > {cap}", inst.phase_count());
        }
    }
}

#[test]
fn results_are_deterministic() {
    let cfg = StreamConfig::new(2, 8.0, 512.0);
    let pts = stream(gaussian(), 800, 2, 512.0, 5);
    let a = process_stream(&cfg, pts.clone()).unwrap();
    let b = process_stream(&cfg, pts).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.centers.len(), 2);
    assert!(a.instance < cfg.amplification);
}

#[test]
fn adversarial_streams_run_clean() {
    for kind in [AdversarialKind::AlternatingExtremes, AdversarialKind::LateShift] {
        let cfg = StreamConfig::new(2, 4.0, 128.0);
        let res = process_stream(&cfg, stream(Generator::Adversarial(kind), 600, 1, 128.0, 2)).unwrap();
        assert_eq!(res.centers.len(), 2);
        assert!(res.log2_cost.is_finite() || res.log2_cost == f64::NEG_INFINITY);
    }
}

#[test]
fn aspect_bound_violation_names_the_arrival() {
    let cfg = StreamConfig::new(1, 4.0, 10.0);
    let pts = vec![Point::from(vec![0.0]), Point::from(vec![3.0]), Point::from(vec![50.0])];
    match process_stream(&cfg, pts) {
        Err(Error::AspectRatioViolated { arrival, observed, .. }) => {
            assert_eq!(arrival, 3);
            assert!(observed > 10.0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn single_repeated_point_costs_nothing() {
    let cfg = StreamConfig::new(1, 4.0, 8.0);
    let res = process_stream(&cfg, std::iter::repeat_n(Point::from(vec![1.0, 1.0]), 200)).unwrap();
    assert_eq!(res.centers, vec![Point::from(vec![1.0, 1.0])]);
    assert_eq!(res.log2_cost, f64::NEG_INFINITY);
}
