//! k-median over an exponentially decayed stream.
//!
//! Weights use the fixed-arrival view: the item arriving at `t` weighs
//! `2^(t/h)`, and only ratios between weights matter. Each instance runs in
//! phases with a guess `L` of the optimal cost. Within a phase, online
//! facility location runs with facility cost `L / (k (1 + log2 W))` until the
//! service cost passes `gamma L`, the facility count passes
//! `(gamma - 1) k (1 + log2 W)`, or `ceil(h log2 Delta)` points have been
//! read. In the last case the next `ceil(h) + k` distinct points are stored
//! verbatim. A phase change clusters the facilities to `k` weighted points
//! with [`km_ram`](crate::offline::km_ram) and raises `L` to
//! `max(beta L, lambda / (alpha gamma))`.
//!
//! [`ExpDecayClusterer`] feeds every arrival to `m` independent instances and
//! answers with the one whose internal cost estimate is smallest.

mod ofl;
mod phase;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use ofl::{online_facility_location, open_probability, OflFacility, OflRun};
pub use phase::{PhaseChangeReason, PhaseState, Subphase, Trigger};

use crate::error::{Error, Result};
use crate::metric::{CostFunction, Point};
use crate::offline::{ALPHA, DEFAULT_DELTA};

pub const DEFAULT_BETA: f64 = 2.0;
pub const DEFAULT_GAMMA: f64 = 10.0;

/// Approximation bound of the phase algorithm for a given offline factor:
/// `(gamma + (1 + alpha beta)/(beta - 1)) (1/gamma + 1 + (1 + alpha beta)/(gamma (beta - 1)))`.
pub fn approximation_bound(beta: f64, gamma: f64, alpha: f64) -> f64 {
    let carry = (1.0 + alpha * beta) / (beta - 1.0);
    (gamma + carry) * (1.0 / gamma + 1.0 + carry / gamma)
}

/// Instances needed for failure probability `delta`: `ceil(log2(1/delta))`.
pub fn amplification_for(delta: f64) -> usize {
    (1.0 / delta).log2().ceil().max(1.0) as usize
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamConfig {
    pub k: usize,
    /// Half-life `h` in arrivals.
    pub half_life: f64,
    /// Upper bound `Delta` on any distance in the stream; the smallest
    /// nonzero distance is taken to be at least 1.
    pub delta_aspect: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Approximation factor assumed of the offline k-median solver.
    pub alpha: f64,
    /// Number of independent instances.
    pub amplification: usize,
    pub cost: CostFunction,
    pub seed: u64,
}

impl StreamConfig {
    pub fn new(k: usize, half_life: f64, delta_aspect: f64) -> Self {
        StreamConfig {
            k,
            half_life,
            delta_aspect,
            beta: DEFAULT_BETA,
            gamma: DEFAULT_GAMMA,
            alpha: ALPHA,
            amplification: amplification_for(DEFAULT_DELTA),
            cost: CostFunction::KMedian,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::param("k must be at least 1"));
        }
        if !(self.half_life > 0.0 && self.half_life.is_finite()) {
            return Err(Error::param(format!("half-life must be > 0, got {}", self.half_life)));
        }
        if !(self.delta_aspect >= 1.0 && self.delta_aspect.is_finite()) {
            return Err(Error::param(format!("aspect ratio bound must be >= 1, got {}", self.delta_aspect)));
        }
        if !(self.beta > 1.0 && self.beta <= 2.0) {
            return Err(Error::param(format!("beta must lie in (1, 2], got {}", self.beta)));
        }
        if !(self.gamma >= 9.0 && self.gamma.is_finite()) {
            return Err(Error::param(format!("gamma must be >= 9, got {}", self.gamma)));
        }
        if !(self.alpha >= 1.0) {
            return Err(Error::param(format!("alpha must be >= 1, got {}", self.alpha)));
        }
        if self.amplification == 0 {
            return Err(Error::param("at least one instance is required"));
        }
        self.cost.validate()
    }

    /// `log2 W` with `W = Delta / (2^(1/h) - 1)`.
    pub fn log2_w(&self) -> f64 {
        // 2^(1/h) - 1 = expm1(ln 2 / h), exact for large h.
        self.delta_aspect.log2() - (std::f64::consts::LN_2 / self.half_life).exp_m1().log2()
    }

    /// Facility count above which a phase change fires: `(gamma - 1) k (1 + log2 W)`.
    pub fn facility_cap(&self) -> f64 {
        (self.gamma - 1.0) * self.k as f64 * (1.0 + self.log2_w())
    }

    /// Points read by online facility location before the verbatim sub-phase:
    /// `ceil(h log2 Delta)`.
    pub fn ofl_read_limit(&self) -> u64 {
        (self.half_life * self.delta_aspect.log2()).ceil().max(0.0) as u64
    }

    /// Distinct points stored in the verbatim sub-phase: `ceil(h) + k`.
    pub fn verbatim_quota(&self) -> usize {
        self.half_life.ceil() as usize + self.k
    }

    /// Most points any instance may hold after an arrival is processed.
    pub fn space_bound(&self) -> f64 {
        self.facility_cap() + self.k as f64 + self.half_life.ceil()
    }

    pub fn approximation_bound(&self) -> f64 {
        approximation_bound(self.beta, self.gamma, self.alpha)
    }
}

/// Answer of the clusterer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpResult {
    pub centers: Vec<Point>,
    /// `log2` of the chosen instance's cost estimate, in fixed-arrival weight
    /// units (the item at `t` weighs `2^(t/h)`).
    pub log2_cost: f64,
    pub phase_count: usize,
    /// Index of the chosen instance.
    pub instance: usize,
    pub n: u64,
}

impl ExpResult {
    /// Cost estimate relative to the weight of the newest item.
    pub fn relative_cost(&self, half_life: f64) -> f64 {
        (self.log2_cost - self.n as f64 / half_life).exp2()
    }
}

/// Fan-out driver over independent [`PhaseState`] instances.
#[derive(Clone, Debug)]
pub struct ExpDecayClusterer {
    cfg: StreamConfig,
    instances: Vec<PhaseState>,
    n: u64,
    dim: Option<usize>,
}

impl ExpDecayClusterer {
    pub fn new(cfg: StreamConfig) -> Result<Self> {
        cfg.validate()?;
        let mut seeder = ChaCha8Rng::seed_from_u64(cfg.seed);
        let instances = (0..cfg.amplification)
            .map(|_| PhaseState::new(cfg.clone(), seeder.next_u64()))
            .collect::<Result<_>>()?;
        Ok(ExpDecayClusterer {
            cfg,
            instances,
            n: 0,
            dim: None,
        })
    }

    pub fn config(&self) -> &StreamConfig {
        &self.cfg
    }

    pub fn instances(&self) -> &[PhaseState] {
        &self.instances
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Largest number of points held by any instance right now.
    pub fn stored_points(&self) -> usize {
        self.instances.iter().map(|i| i.stored()).max().unwrap_or(0)
    }

    pub fn peak_stored(&self) -> usize {
        self.instances.iter().map(|i| i.peak_stored()).max().unwrap_or(0)
    }

    pub fn insert(&mut self, p: Point) -> Result<()> {
        match self.dim {
            Some(d) if d != p.dim() => {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.dim(),
                })
            }
            None => self.dim = Some(p.dim()),
            _ => {}
        }
        self.n += 1;
        let bound = self.cfg.space_bound();
        for inst in &mut self.instances {
            inst.observe(&p, self.n)?;
            assert!(
                inst.stored() as f64 <= bound,
                "space invariant violated: {} stored, bound {bound}",
                inst.stored()
            );
        }
        Ok(())
    }

    /// Final `k` centers from the instance with the smallest cost estimate.
    pub fn finish(&self) -> Result<ExpResult> {
        if self.n == 0 {
            return Err(Error::Empty("stream"));
        }
        let mut best: Option<ExpResult> = None;
        for (idx, inst) in self.instances.iter().enumerate() {
            let (centers, log2_cost) = inst.finish()?;
            if best.as_ref().is_none_or(|b| log2_cost < b.log2_cost) {
                best = Some(ExpResult {
                    centers,
                    log2_cost,
                    phase_count: inst.phase_count(),
                    instance: idx,
                    n: self.n,
                });
            }
        }
        Ok(best.expect("at least one instance"))
    }
}

/// Runs the clusterer over a whole stream.
pub fn process_stream(cfg: &StreamConfig, stream: impl IntoIterator<Item = Point>) -> Result<ExpResult> {
    let mut clusterer = ExpDecayClusterer::new(cfg.clone())?;
    for p in stream {
        clusterer.insert(p)?;
    }
    clusterer.finish()
}

#[cfg(test)]
mod tests;
