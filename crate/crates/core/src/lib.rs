//! Clustering summaries for time-decayed data streams.
//!
//! Two streaming summaries are provided:
//!
//! * [`polydecay::PolyDecaySketch`] keeps a weighted coreset of a stream whose
//!   `a`-th most recent element has weight `a^(-s)`. Blocks of consecutive
//!   elements are merged and reduced once their decayed weights are close
//!   enough to share a single weight.
//! * [`expdecay::ExpDecayClusterer`] keeps `k` medians of a stream whose
//!   weights halve every `h` arrivals, using phases of online facility
//!   location and an offline k-median solver at each phase change.
//!
//! [`oracle`] holds brute-force reference computations, [`harness`] runs
//! seeded experiments, and [`cli`] is the command-line front end.

pub mod cli;
pub mod error;
pub mod expdecay;
pub mod harness;
pub mod logspace;
pub mod metric;
pub mod offline;
pub mod oracle;
pub mod polydecay;

pub use error::{Error, Result};
pub use metric::{decay_weight, distance, weighted_cost, CostFunction, DecayFunction, Point, QuerySpace, WeightedPoint};
pub use offline::{cs_ram, d2_seeding, km_ram, Coreset, KmResult, ALPHA};
