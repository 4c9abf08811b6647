use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::Point;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum AdversarialKind {
    /// Points alternate between two opposite corners of the box.
    AlternatingExtremes,
    /// A tight cluster for the first half, then a second one far away.
    LateShift,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Generator {
    /// Gaussian blobs around `clusters` centers; every center moves by
    /// `drift` per arrival along its own random direction.
    GaussianClusters { clusters: usize, spread: f64, drift: f64 },
    UniformBox,
    Adversarial(AdversarialKind),
}

/// A synthetic stream: `n` points in `[0, extent]^dim`, optionally rounded
/// to the integer lattice so distinct points are at least 1 apart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamSpec {
    pub generator: Generator,
    pub n: usize,
    pub dim: usize,
    pub extent: f64,
    pub quantize: bool,
}

impl StreamSpec {
    pub fn new(generator: Generator, n: usize, dim: usize, extent: f64) -> Self {
        StreamSpec {
            generator,
            n,
            dim,
            extent,
            quantize: false,
        }
    }

    /// Lattice stream whose diameter is at most `delta`.
    pub fn with_aspect_bound(generator: Generator, n: usize, dim: usize, delta: f64) -> Self {
        StreamSpec {
            generator,
            n,
            dim,
            extent: (delta / (dim as f64).sqrt()).floor().max(1.0),
            quantize: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::param("dimension must be at least 1"));
        }
        if !(self.extent > 0.0 && self.extent.is_finite()) {
            return Err(Error::param(format!("extent must be > 0, got {}", self.extent)));
        }
        if let Generator::GaussianClusters { clusters, spread, .. } = self.generator {
            if clusters == 0 || !(spread >= 0.0) {
                return Err(Error::param("gaussian generator needs clusters >= 1 and spread >= 0"));
            }
        }
        Ok(())
    }

    pub fn generate(&self, seed: u64) -> Result<Vec<Point>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, ext) = (self.dim, self.extent);
        let raw: Vec<Vec<f64>> = match self.generator {
            Generator::UniformBox => (0..self.n).map(|_| (0..d).map(|_| rng.random::<f64>() * ext).collect()).collect(),
            Generator::GaussianClusters { clusters, spread, drift } => {
                let margin = (3.0 * spread).min(ext / 4.0);
                let centers: Vec<Vec<f64>> = (0..clusters)
                    .map(|_| (0..d).map(|_| margin + rng.random::<f64>() * (ext - 2.0 * margin)).collect())
                    .collect();
                let dirs: Vec<Vec<f64>> = (0..clusters)
                    .map(|_| {
                        let v: Vec<f64> = (0..d).map(|_| rng.random::<f64>() - 0.5).collect();
                        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
                        v.into_iter().map(|x| x / norm).collect()
                    })
                    .collect();
                let noise = Normal::new(0.0, spread).map_err(|e| Error::param(e.to_string()))?;
                (0..self.n)
                    .map(|t| {
                        let j = rng.random_range(0..clusters);
                        (0..d)
                            .map(|a| centers[j][a] + drift * t as f64 * dirs[j][a] + noise.sample(&mut rng))
                            .collect()
                    })
                    .collect()
            }
            Generator::Adversarial(AdversarialKind::AlternatingExtremes) => (0..self.n)
                .map(|t| {
                    let base = if t % 2 == 0 { 0.0 } else { ext };
                    (0..d).map(|_| base + (rng.random::<f64>() - 0.5) * ext * 0.02).collect()
                })
                .collect(),
            Generator::Adversarial(AdversarialKind::LateShift) => (0..self.n)
                .map(|t| {
                    let base = if t < self.n / 2 { ext * 0.1 } else { ext * 0.9 };
                    (0..d).map(|_| base + (rng.random::<f64>() - 0.5) * ext * 0.05).collect()
                })
                .collect(),
        };
        Ok(raw
            .into_iter()
            .map(|c| {
                let coords = c
                    .into_iter()
                    .map(|x| {
                        let x = x.clamp(0.0, ext);
                        if self.quantize {
                            x.round().clamp(0.0, ext.floor())
                        } else {
                            x
                        }
                    })
                    .collect();
                Point { coords }
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_streams_respect_the_aspect_bound() {
        for gen in [
            Generator::UniformBox,
            Generator::GaussianClusters { clusters: 3, spread: 20.0, drift: 0.5 },
            Generator::Adversarial(AdversarialKind::AlternatingExtremes),
            Generator::Adversarial(AdversarialKind::LateShift),
        ] {
            let spec = StreamSpec::with_aspect_bound(gen, 200, 2, 256.0);
            let pts = spec.generate(4).unwrap();
            assert_eq!(pts.len(), 200);
            for p in &pts {
                assert!(p.coords.iter().all(|c| c.fract() == 0.0));
                for q in &pts {
                    assert!(p.dist_unchecked(q) <= 256.0);
                }
            }
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let spec = StreamSpec::new(Generator::GaussianClusters { clusters: 2, spread: 1.0, drift: 0.0 }, 50, 3, 100.0);
        assert_eq!(spec.generate(9).unwrap(), spec.generate(9).unwrap());
        assert_ne!(spec.generate(9).unwrap(), spec.generate(10).unwrap());
    }
}
