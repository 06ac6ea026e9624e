//! Deterministic sample generation for the empirical checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    pub count: usize,
    /// Coordinates are drawn from `[-range, range]`.
    pub range: f64,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            count: 10_000,
            range: 10.0,
            seed: 0,
        }
    }
}

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::EmptySampleSet);
        }
        if !(self.range.is_finite() && self.range > 0.0) {
            return Err(Error::invalid(format!(
                "sample range must be positive and finite, got {}",
                self.range
            )));
        }
        Ok(())
    }

    pub fn cube(&self, dim: usize) -> DomainBox {
        DomainBox {
            lo: Vector::splat(dim, -self.range).expect("finite range"),
            hi: Vector::splat(dim, self.range).expect("finite range"),
        }
    }
}

/// Axis-aligned box `[lo₁, hi₁] × … × [loₙ, hiₙ]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainBox {
    pub lo: Vector,
    pub hi: Vector,
}

impl DomainBox {
    pub fn new(lo: Vector, hi: Vector) -> Result<Self> {
        hi.ensure_dim(lo.dim())?;
        if lo.coords().iter().zip(hi.coords()).any(|(l, h)| l > h) {
            return Err(Error::invalid("domain box needs lo <= hi coordinate-wise"));
        }
        Ok(DomainBox { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Vector {
        let coords = self
            .lo
            .coords()
            .iter()
            .zip(self.hi.coords())
            .map(|(&l, &h)| if l == h { l } else { rng.gen_range(l..=h) })
            .collect();
        Vector::new(coords).expect("box coordinates are finite")
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` points drawn uniformly from `domain` with a seeded stream.
pub fn uniform_in_box(domain: &DomainBox, count: usize, seed: u64) -> Vec<Vector> {
    let mut rng = rng(seed);
    (0..count).map(|_| domain.draw(&mut rng)).collect()
}

pub fn uniform_vectors(dim: usize, cfg: &SampleConfig) -> Vec<Vector> {
    uniform_in_box(&cfg.cube(dim), cfg.count, cfg.seed)
}

pub fn uniform_pairs(dim: usize, cfg: &SampleConfig) -> Vec<(Vector, Vector)> {
    let cube = cfg.cube(dim);
    let mut rng = rng(cfg.seed);
    (0..cfg.count)
        .map(|_| (cube.draw(&mut rng), cube.draw(&mut rng)))
        .collect()
}

/// `count` scalars uniform on `[-range, range]`.
pub fn uniform_scalars(range: f64, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed);
    (0..count).map(|_| rng.gen_range(-range..=range)).collect()
}

/// `lists` term sequences with lengths uniform on `1..=max_len` and
/// coordinates uniform on `[-range, range]`.
pub fn uniform_term_lists(
    dim: usize,
    lists: usize,
    max_len: usize,
    cfg: &SampleConfig,
) -> Vec<Vec<Vector>> {
    let cube = cfg.cube(dim);
    let mut rng = rng(cfg.seed);
    (0..lists)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.max(1));
            (0..len).map(|_| cube.draw(&mut rng)).collect()
        })
        .collect()
}

/// Structured pairs that uniform sampling almost never hits: disjoint unit
/// supports, coincident directions, and sums that cancel a coordinate.
pub fn probe_pairs(dim: usize) -> Vec<(Vector, Vector)> {
    let mut out = Vec::new();
    for i in 0..dim {
        let ei = Vector::basis(dim, i);
        out.push((ei.clone(), ei.clone()));
        for j in (i + 1)..dim {
            out.push((ei.clone(), Vector::basis(dim, j)));
        }
    }
    if dim >= 2 {
        let e1 = Vector::basis(dim, 0);
        let e2 = Vector::basis(dim, 1);
        for t in [1e-1, 1e-3, 1e-6, 1e-9] {
            let small = e2.scale(t).unwrap();
            // x = e₁ + t·e₂, y = −t·e₂: the sum lies on the first axis
            out.push((e1.add(&small).unwrap(), small.scale(-1.0).unwrap()));
            // x on the axis, y slightly off it
            out.push((e1.clone(), small));
        }
    }
    out
}
