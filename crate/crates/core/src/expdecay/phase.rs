use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ofl::{open_probability, OflFacility};
use super::StreamConfig;
use crate::error::{Error, Result};
use crate::logspace::{log2_add, log2_sum, to_log2, LOG2_ZERO};
use crate::metric::{nearest, Point, WeightedPoint};
use crate::offline::km_ram;

/// `log2 max(beta L, lambda / (alpha gamma))`.
pub fn next_log2_guess(log2_guess: f64, log2_lambda: f64, cfg: &StreamConfig) -> f64 {
    let raised = log2_guess + cfg.beta.log2();
    let from_lambda = log2_lambda - (cfg.alpha * cfg.gamma).log2();
    raised.max(from_lambda)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subphase {
    /// Online facility location.
    Ofl,
    /// Points are stored exactly.
    Verbatim,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseChangeReason {
    /// Service cost above `gamma L` or too many facilities.
    CostOrFacilities,
    /// The verbatim sub-phase stored its quota of distinct points.
    Verbatim,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trigger {
    Continue,
    StartVerbatim,
    PhaseChange(PhaseChangeReason),
}

/// State of one instance of the phase algorithm. All magnitudes that scale
/// with point weights (`L`, facility cost, running cost, facility weights)
/// are base-2 logarithms relative to the fixed arrival weights `2^(t/h)`.
#[derive(Clone, Debug)]
pub struct PhaseState {
    cfg: StreamConfig,
    log2_guess: f64,
    facilities: Vec<OflFacility>,
    log2_running_cost: f64,
    /// Upper bound on the cost of the stream before this phase against the
    /// facilities this phase started with.
    log2_carried_cost: f64,
    read: u64,
    subphase: Subphase,
    verbatim_count: usize,
    phases: usize,
    peak_stored: usize,
    rng: ChaCha8Rng,
}

impl PhaseState {
    pub fn new(cfg: StreamConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        Ok(PhaseState {
            cfg,
            log2_guess: 0.0,
            facilities: Vec::new(),
            log2_running_cost: LOG2_ZERO,
            log2_carried_cost: LOG2_ZERO,
            read: 0,
            subphase: Subphase::Ofl,
            verbatim_count: 0,
            phases: 0,
            peak_stored: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn config(&self) -> &StreamConfig {
        &self.cfg
    }

    /// `log2 L`.
    pub fn log2_guess(&self) -> f64 {
        self.log2_guess
    }

    /// `log2` of the service cost accumulated in the current phase.
    pub fn log2_running_cost(&self) -> f64 {
        self.log2_running_cost
    }

    /// `log2 f = log2 L - log2(k (1 + log2 W))`.
    pub fn log2_facility_cost(&self) -> f64 {
        self.log2_guess - (self.cfg.k as f64 * (1.0 + self.cfg.log2_w())).log2()
    }

    pub fn facilities(&self) -> &[OflFacility] {
        &self.facilities
    }

    /// Facilities plus verbatim points currently held.
    pub fn stored(&self) -> usize {
        self.facilities.len()
    }

    pub fn peak_stored(&self) -> usize {
        self.peak_stored
    }

    pub fn subphase(&self) -> Subphase {
        self.subphase
    }

    pub fn read_this_phase(&self) -> u64 {
        self.read
    }

    pub fn verbatim_count(&self) -> usize {
        self.verbatim_count
    }

    /// Completed phase changes.
    pub fn phase_count(&self) -> usize {
        self.phases
    }

    fn centers(&self) -> Vec<Point> {
        self.facilities.iter().map(|f| f.point.clone()).collect()
    }

    fn check_aspect(&self, distance: f64, arrival: u64) -> Result<()> {
        if distance > self.cfg.delta_aspect {
            return Err(Error::AspectRatioViolated {
                observed: distance,
                bound: self.cfg.delta_aspect,
                arrival,
            });
        }
        Ok(())
    }

    fn open(&mut self, p: &Point, log2_weight: f64, arrival: u64) {
        self.facilities.push(OflFacility {
            point: p.clone(),
            log_weight: log2_weight,
            opened_at: arrival,
        });
    }

    /// One online facility location step for the point arriving at `arrival`.
    pub fn ofl_step(&mut self, p: &Point, arrival: u64) -> Result<()> {
        debug_assert_eq!(self.subphase, Subphase::Ofl);
        let log2_weight = arrival as f64 / self.cfg.half_life;
        if self.facilities.is_empty() {
            self.open(p, log2_weight, arrival);
        } else {
            let (q, service) = nearest(self.cfg.cost, p, &self.centers());
            self.check_aspect(p.dist_unchecked(&self.facilities[q].point), arrival)?;
            let sigma = open_probability(log2_weight, service, self.log2_facility_cost());
            if self.rng.random::<f64>() < sigma {
                self.open(p, log2_weight, arrival);
            } else {
                self.log2_running_cost = log2_add(self.log2_running_cost, log2_weight + to_log2(service));
                self.facilities[q].absorb(log2_weight);
            }
        }
        self.read += 1;
        Ok(())
    }

    /// Stores the point exactly, folding it into a coincident stored point.
    pub fn verbatim_step(&mut self, p: &Point, arrival: u64) -> Result<()> {
        debug_assert_eq!(self.subphase, Subphase::Verbatim);
        let log2_weight = arrival as f64 / self.cfg.half_life;
        let (q, d) = nearest(self.cfg.cost, p, &self.centers());
        self.check_aspect(p.dist_unchecked(&self.facilities[q].point), arrival)?;
        if d == 0.0 {
            self.facilities[q].absorb(log2_weight);
        } else {
            self.open(p, log2_weight, arrival);
            self.verbatim_count += 1;
        }
        self.read += 1;
        Ok(())
    }

    pub fn check_phase_triggers(&self) -> Trigger {
        match self.subphase {
            Subphase::Ofl => {
                let over_cost = self.log2_running_cost > self.cfg.gamma.log2() + self.log2_guess;
                if over_cost || self.facilities.len() as f64 > self.cfg.facility_cap() {
                    Trigger::PhaseChange(PhaseChangeReason::CostOrFacilities)
                } else if self.read >= self.cfg.ofl_read_limit() {
                    Trigger::StartVerbatim
                } else {
                    Trigger::Continue
                }
            }
            Subphase::Verbatim => {
                if self.verbatim_count >= self.cfg.verbatim_quota() {
                    Trigger::PhaseChange(PhaseChangeReason::Verbatim)
                } else {
                    Trigger::Continue
                }
            }
        }
    }

    /// Facilities as linear weights relative to the heaviest one, and that
    /// reference exponent.
    fn relative_facilities(&self) -> (Vec<WeightedPoint>, f64) {
        let top = self.facilities.iter().map(|f| f.log_weight).fold(f64::NEG_INFINITY, f64::max);
        let pts = self
            .facilities
            .iter()
            .map(|f| WeightedPoint::new(f.point.clone(), (f.log_weight - top).exp2(), f.opened_at))
            .collect();
        (pts, top)
    }

    /// Clusters the facilities to `k` weighted points. Returns the new
    /// facilities and `log2 lambda`.
    fn cluster_facilities(&self, seed: u64) -> Result<(Vec<OflFacility>, f64)> {
        let (pts, top) = self.relative_facilities();
        let km = km_ram(&pts, self.cfg.cost, self.cfg.k, seed)?;
        let mut acc = vec![Vec::new(); km.centers.len()];
        for f in &self.facilities {
            acc[nearest(self.cfg.cost, &f.point, &km.centers).0].push(f.log_weight);
        }
        let merged = km
            .centers
            .into_iter()
            .zip(acc)
            .map(|(point, lws)| {
                let opened_at = self
                    .facilities
                    .iter()
                    .find(|f| f.point == point)
                    .map_or(0, |f| f.opened_at);
                OflFacility {
                    point,
                    log_weight: log2_sum(lws),
                    opened_at,
                }
            })
            .collect();
        Ok((merged, to_log2(km.lambda_cost) + top))
    }

    /// Collapses the facilities to `k` weighted points and raises the guess to
    /// `max(beta L, lambda / (alpha gamma))`.
    pub fn phase_change(&mut self) -> Result<()> {
        let seed = self.rng.next_u64();
        let (merged, log2_lambda) = self.cluster_facilities(seed)?;
        self.facilities = merged;
        self.log2_carried_cost = log2_sum([self.log2_carried_cost, self.log2_running_cost, log2_lambda]);
        self.log2_guess = next_log2_guess(self.log2_guess, log2_lambda, &self.cfg);
        self.log2_running_cost = LOG2_ZERO;
        self.read = 0;
        self.subphase = Subphase::Ofl;
        self.verbatim_count = 0;
        self.phases += 1;
        Ok(())
    }

    /// Processes one arrival end to end, including any phase change.
    pub fn observe(&mut self, p: &Point, arrival: u64) -> Result<()> {
        match self.subphase {
            Subphase::Ofl => self.ofl_step(p, arrival)?,
            Subphase::Verbatim => self.verbatim_step(p, arrival)?,
        }
        self.peak_stored = self.peak_stored.max(self.stored());
        match self.check_phase_triggers() {
            Trigger::Continue => {}
            Trigger::StartVerbatim => self.subphase = Subphase::Verbatim,
            Trigger::PhaseChange(_) => self.phase_change()?,
        }
        Ok(())
    }

    /// Final `k` centers and `log2` of the cost estimate: carried cost plus
    /// this phase's service cost plus the final clustering cost.
    pub fn finish(&self) -> Result<(Vec<Point>, f64)> {
        if self.facilities.is_empty() {
            return Err(Error::Empty("stream"));
        }
        let seed = self.rng.clone().next_u64();
        let (merged, log2_lambda) = self.cluster_facilities(seed)?;
        let estimate = log2_sum([self.log2_carried_cost, self.log2_running_cost, log2_lambda]);
        Ok((merged.into_iter().map(|f| f.point).collect(), estimate))
    }
}
