//! Exponential-decay k-median with phase-based online facility location.
//!
//! Streams points whose clusters move halfway through, prints how each
//! amplification instance evolved, and compares the answer with the
//! exhaustive optimum of the decayed stream.
//!
//! ```bash
//! cargo run --example exp_kmedian
//! ```

use decaystream::expdecay::{ExpDecayClusterer, StreamConfig};
use decaystream::harness::{AdversarialKind, Generator, StreamSpec};
use decaystream::metric::{weighted_cost, CostFunction, DecayFunction, WeightedPoint};
use decaystream::oracle::{exhaustive_kmedian, materialize_weights};

fn main() -> decaystream::Result<()> {
    let delta = 1024.0;
    let cfg = StreamConfig::new(2, 8.0, delta);
    println!(
        "k={} h={} delta={delta}: W = 2^{:.2}, facility cap {:.1}, space bound {:.1}, approximation bound {:.1}",
        cfg.k,
        cfg.half_life,
        cfg.log2_w(),
        cfg.facility_cap(),
        cfg.space_bound(),
        cfg.approximation_bound()
    );

    let stream = StreamSpec::with_aspect_bound(Generator::Adversarial(AdversarialKind::LateShift), 300, 1, delta).generate(3)?;
    let mut cl = ExpDecayClusterer::new(cfg.clone())?;
    for p in &stream {
        cl.insert(p.clone())?;
    }
    for (i, inst) in cl.instances().iter().enumerate() {
        println!(
            "instance {i}: {} phases, log2 L = {:.2}, {} stored now, peak {}",
            inst.phase_count(),
            inst.log2_guess(),
            inst.stored(),
            inst.peak_stored()
        );
    }

    let res = cl.finish()?;
    let centers: Vec<Vec<f64>> = res.centers.iter().map(|c| c.coords.clone()).collect();
    println!("picked instance {}: centers {centers:?}, log2 cost estimate {:.3}", res.instance, res.log2_cost);

    let unit: Vec<WeightedPoint> = stream.iter().enumerate().map(|(i, p)| WeightedPoint::unit(p.clone(), i as u64 + 1)).collect();
    let exact = materialize_weights(&unit, DecayFunction::Exponential { half_life: cfg.half_life }, res.n)?;
    let cost = weighted_cost(&exact, CostFunction::KMedian, &res.centers)?;
    let (opt_centers, opt) = exhaustive_kmedian(&exact, CostFunction::KMedian, cfg.k)?;
    let opt_coords: Vec<Vec<f64>> = opt_centers.iter().map(|c| c.coords.clone()).collect();
    println!("decayed cost {cost:.4} (newest item weighs 1), optimum {opt:.4} at {opt_coords:?}, ratio {:.3}", cost / opt);
    Ok(())
}
