//! Offline building blocks used by the streaming summaries: coreset
//! construction by sensitivity sampling ([`cs_ram`]) and constant-factor
//! weighted k-median by single-swap local search ([`km_ram`]).

mod coreset;
mod local_search;
mod seeding;

use std::collections::HashMap;

pub use coreset::{cs_ram, cs_ram_with, size_budget, Coreset, CsRamConfig, DEFAULT_SAMPLE_CONSTANT};
pub use local_search::{km_ram, km_ram_with, KmConfig, KmResult, ALPHA, SWAP_TOL};
pub use seeding::d2_seeding;

pub(crate) use seeding::sample_index;

use crate::metric::WeightedPoint;

/// Default failure probability for the randomized offline routines.
pub const DEFAULT_DELTA: f64 = 0.05;

fn coord_key(wp: &WeightedPoint) -> Vec<u64> {
    // +0.0 and -0.0 are the same location.
    wp.point.coords.iter().map(|c| (c + 0.0).to_bits()).collect()
}

/// Collapses identical locations into one entry with the summed weight and
/// the latest arrival index, dropping zero-weight entries. Order of first
/// appearance is kept.
pub fn merge_duplicates(points: &[WeightedPoint]) -> Vec<WeightedPoint> {
    let mut slot: HashMap<Vec<u64>, usize> = HashMap::with_capacity(points.len());
    let mut out: Vec<WeightedPoint> = Vec::with_capacity(points.len());
    for wp in points {
        if wp.weight <= 0.0 {
            continue;
        }
        match slot.get(&coord_key(wp)) {
            Some(&i) => {
                out[i].weight += wp.weight;
                out[i].arrival = out[i].arrival.max(wp.arrival);
            }
            None => {
                slot.insert(coord_key(wp), out.len());
                out.push(wp.clone());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Point;

    #[test]
    fn duplicates_fold_into_one_entry() {
        let pts = vec![
            WeightedPoint::new(Point::from(vec![1.0, -0.0]), 2.0, 1),
            WeightedPoint::new(Point::from(vec![3.0, 3.0]), 1.0, 2),
            WeightedPoint::new(Point::from(vec![1.0, 0.0]), 0.5, 3),
            WeightedPoint::new(Point::from(vec![9.0, 9.0]), 0.0, 4),
        ];
        let merged = merge_duplicates(&pts);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].weight, 2.5);
        assert_eq!(merged[0].arrival, 3);
        assert_eq!(merged[1].weight, 1.0);
    }
}
