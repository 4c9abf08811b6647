//! Coreset of a polynomially decayed stream.
//!
//! Every arrival starts as its own block. A block `[a, a + 2^j - 1]` whose
//! start is aligned to `2^(j+1)` absorbs the following `2^j` elements once
//! `a + x_(j+1) <= n`, where `x_(j+1)` is the level's marker: from then on all
//! elements of the merged block have decayed weights within a factor
//! `(1+eps)/(1-eps)` of each other, so one weight per block suffices. Merged
//! blocks are reduced with [`cs_ram`] at accuracy `eps / (3 log2 N_max)`, and
//! a query scales each block's coreset by [`block_weight`].

mod markers;

use serde::{Deserialize, Serialize};

pub use markers::{compute_marker, MarkerTable, MAX_LEVEL};

use crate::error::{Error, Result};
use crate::metric::{CostFunction, Point, WeightedPoint};
use crate::offline::{cs_ram_with, Coreset, CsRamConfig};

/// Default bound on the stream length.
pub const DEFAULT_N_MAX: u64 = 1 << 30;

/// Weight shared by every element of a block whose newest element has age
/// `newest_age` and oldest element has age `oldest_age` (ages are `n - t + 1`):
/// `((1-eps) / newest_age^s + (1+eps) / oldest_age^s) / 2`.
///
/// When the block's weight spread is within `(1+eps)/(1-eps)`, the result lies
/// in `[(1-eps) w(p), (1+eps) w(p)]` for every element weight `w(p)`.
pub fn block_weight(newest_age: u64, oldest_age: u64, s: f64, epsilon: f64) -> f64 {
    debug_assert!(1 <= newest_age && newest_age <= oldest_age);
    0.5 * ((1.0 - epsilon) / (newest_age as f64).powf(s) + (1.0 + epsilon) / (oldest_age as f64).powf(s))
}

/// Consecutive arrivals `[start, end]` and a coreset of their points with
/// unit (undecayed) weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub start: u64,
    pub end: u64,
    pub level: u32,
    pub summary: Coreset,
}

impl Block {
    pub fn span(&self) -> u64 {
        self.end - self.start + 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyConfig {
    /// Decay exponent; the `a`-th most recent item weighs `a^(-s)`.
    pub s: f64,
    pub epsilon: f64,
    pub k: usize,
    pub cost: CostFunction,
    /// Upper bound on the stream length; fixes the reduce accuracy.
    pub n_max: u64,
    pub seed: u64,
    pub coreset: CsRamConfig,
    /// Overrides the reduce accuracy `eps / (3 log2 N_max)`. The query then no
    /// longer carries the `eps` guarantee; useful to trade accuracy for space.
    pub reduce_epsilon: Option<f64>,
}

impl PolyConfig {
    pub fn new(s: f64, epsilon: f64, k: usize) -> Self {
        PolyConfig {
            s,
            epsilon,
            k,
            cost: CostFunction::KMedian,
            n_max: DEFAULT_N_MAX,
            seed: 0,
            coreset: CsRamConfig::default(),
            reduce_epsilon: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::param(format!("decay exponent s must be >= 0, got {}", self.s)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::param(format!("epsilon must lie in (0,1), got {}", self.epsilon)));
        }
        if self.k == 0 {
            return Err(Error::param("k must be at least 1"));
        }
        if self.n_max < 2 {
            return Err(Error::param("n_max must be at least 2"));
        }
        if let Some(e) = self.reduce_epsilon {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::param(format!("reduce epsilon must lie in (0,1), got {e}")));
            }
        }
        self.cost.validate()
    }

    /// Accuracy passed to each reduce step.
    pub fn reduce_accuracy(&self) -> f64 {
        self.reduce_epsilon
            .unwrap_or_else(|| self.epsilon / (3.0 * (self.n_max as f64).log2()))
    }

    /// `s ln n / ln((1+eps)/(1-eps)) + 2 log2 n + 2`.
    pub fn block_count_bound(&self, n: u64) -> f64 {
        let n = n.max(1) as f64;
        let ratio = ((1.0 + self.epsilon) / (1.0 - self.epsilon)).ln();
        self.s * n.ln() / ratio + 2.0 * n.log2() + 2.0
    }
}

/// Streaming coreset under polynomial decay. Single writer: `insert` takes
/// `&mut self`, `query` only reads.
#[derive(Clone, Debug)]
pub struct PolyDecaySketch {
    config: PolyConfig,
    markers: MarkerTable,
    /// Oldest first.
    blocks: Vec<Block>,
    n: u64,
    dim: Option<usize>,
}

impl PolyDecaySketch {
    pub fn new(config: PolyConfig) -> Result<Self> {
        config.validate()?;
        let markers = MarkerTable::new(config.s, config.epsilon)?;
        Ok(PolyDecaySketch {
            config,
            markers,
            blocks: Vec::new(),
            n: 0,
            dim: None,
        })
    }

    pub fn config(&self) -> &PolyConfig {
        &self.config
    }

    /// Points seen so far.
    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Blocks, oldest first.
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Weighted points held across all block summaries.
    pub fn stored_points(&self) -> usize {
        self.blocks.iter().map(|b| b.summary.len()).sum()
    }

    pub fn markers(&self) -> &MarkerTable {
        &self.markers
    }

    /// Appends the next stream element.
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
        if self.n >= self.config.n_max {
            return Err(Error::StreamTooLong { n_max: self.config.n_max });
        }
        self.n += 1;
        let n = self.n;
        self.blocks.push(Block {
            start: n,
            end: n,
            level: 0,
            summary: Coreset {
                entries: vec![WeightedPoint::unit(p, n)],
                epsilon: self.config.epsilon,
                source_size: 1,
            },
        });
        while let Some(at) = self.next_merge()? {
            self.merge_from(at)?;
        }
        Ok(())
    }

    /// Oldest block whose marker has been reached.
    fn next_merge(&mut self) -> Result<Option<usize>> {
        for idx in 0..self.blocks.len() {
            let (start, level) = (self.blocks[idx].start, self.blocks[idx].level);
            if level >= MAX_LEVEL {
                continue;
            }
            let next_span = 1u64 << (level + 1);
            if (start - 1) % next_span != 0 {
                continue;
            }
            let marker = self.markers.get(level + 1)?;
            if start.saturating_add(marker) <= self.n {
                return Ok(Some(idx));
            }
        }
        Ok(None)
    }

    /// Merges the blocks covering `[a, a + 2^(j+1) - 1]` where block `at`
    /// starts at `a` with level `j`, then reduces the union.
    fn merge_from(&mut self, at: usize) -> Result<()> {
        let start = self.blocks[at].start;
        let level = self.blocks[at].level + 1;
        let end = start + (1u64 << level) - 1;
        let last = at + self.blocks[at..]
            .iter()
            .position(|b| b.end == end)
            .expect("aligned blocks tile the merge range");
        let merged: Vec<Block> = self.blocks.drain(at..=last).collect();
        let source_size = merged.iter().map(|b| b.summary.source_size).sum();
        let union: Vec<WeightedPoint> = merged.into_iter().flat_map(|b| b.summary.entries).collect();
        let seed = self.config.seed ^ start.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ ((level as u64) << 56);
        let mut summary = cs_ram_with(
            &union,
            self.config.cost,
            self.config.k,
            self.config.reduce_accuracy(),
            seed,
            &self.config.coreset,
        )?;
        summary.source_size = source_size;
        self.blocks.insert(
            at,
            Block {
                start,
                end,
                level,
                summary,
            },
        );
        Ok(())
    }

    /// Union of the block coresets, each scaled by its block weight at the
    /// current time. Does not modify the sketch.
    pub fn query(&self) -> Coreset {
        let n = self.n;
        let (s, eps) = (self.config.s, self.config.epsilon);
        let entries = self
            .blocks
            .iter()
            .flat_map(|b| {
                let u = block_weight(n - b.end + 1, n - b.start + 1, s, eps);
                b.summary.entries.iter().map(move |e| WeightedPoint {
                    weight: e.weight * u,
                    ..e.clone()
                })
            })
            .collect();
        Coreset {
            entries,
            epsilon: eps,
            source_size: n,
        }
    }

    /// Checks the tiling invariants: blocks cover `[1, n]` contiguously, each
    /// spans `2^level` elements and starts on a multiple of its span.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let mut expect = 1;
        for b in &self.blocks {
            if b.start != expect {
                return Err(format!("gap or overlap at block [{}, {}], expected start {expect}", b.start, b.end));
            }
            if b.span() != 1u64 << b.level {
                return Err(format!("block [{}, {}] has level {}", b.start, b.end, b.level));
            }
            if (b.start - 1) % b.span() != 0 {
                return Err(format!("block [{}, {}] is not aligned", b.start, b.end));
            }
            expect = b.end + 1;
        }
        if expect != self.n + 1 {
            return Err(format!("blocks end at {}, stream length {}", expect - 1, self.n));
        }
        Ok(())
    }
}
