use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logspace::{log2_add, to_log2};
use crate::metric::{nearest, CostFunction, Point, WeightedPoint};

/// An open facility with its accumulated weight in the log2 domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OflFacility {
    pub point: Point,
    pub log_weight: f64,
    pub opened_at: u64,
}

impl OflFacility {
    pub(crate) fn absorb(&mut self, log_weight: f64) {
        self.log_weight = log2_add(self.log_weight, log_weight);
    }
}

/// `min(w d / f, 1)` from log2 weight and log2 facility cost.
#[inline]
pub fn open_probability(log2_weight: f64, service: f64, log2_facility_cost: f64) -> f64 {
    if service <= 0.0 {
        return 0.0;
    }
    let log2_sigma = log2_weight + service.log2() - log2_facility_cost;
    if log2_sigma >= 0.0 {
        1.0
    } else {
        log2_sigma.exp2()
    }
}

/// Outcome of one online facility location pass.
#[derive(Clone, Debug, PartialEq)]
pub struct OflRun {
    pub service_cost: f64,
    pub facilities: Vec<WeightedPoint>,
}

/// One pass of online facility location over a weighted sequence with fixed
/// facility cost: each point opens a facility with probability
/// `min(w(p) cost(p, nearest) / f, 1)` and is otherwise served by, and merged
/// into, its nearest facility.
pub fn online_facility_location(points: &[WeightedPoint], facility_cost: f64, cost: CostFunction, seed: u64) -> Result<OflRun> {
    if !(facility_cost > 0.0) {
        return Err(Error::param(format!("facility cost must be > 0, got {facility_cost}")));
    }
    let log2_f = facility_cost.log2();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut facilities: Vec<OflFacility> = Vec::new();
    let mut service = 0.0;
    let centers = |fs: &[OflFacility]| fs.iter().map(|f| f.point.clone()).collect::<Vec<_>>();
    for wp in points {
        let lw = to_log2(wp.weight);
        if facilities.is_empty() {
            facilities.push(OflFacility {
                point: wp.point.clone(),
                log_weight: lw,
                opened_at: wp.arrival,
            });
            continue;
        }
        let (q, d) = nearest(cost, &wp.point, &centers(&facilities));
        let sigma = open_probability(lw, d, log2_f);
        if rng.random::<f64>() < sigma {
            facilities.push(OflFacility {
                point: wp.point.clone(),
                log_weight: lw,
                opened_at: wp.arrival,
            });
        } else {
            service += wp.weight * d;
            facilities[q].absorb(lw);
        }
    }
    Ok(OflRun {
        service_cost: service,
        facilities: facilities
            .into_iter()
            .map(|f| WeightedPoint::new(f.point, f.log_weight.exp2(), f.opened_at))
            .collect(),
    })
}
