use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Column;
use crate::error::{Error, Result};

pub const DEFAULT_RESERVOIR: usize = 4096;

/// Uniform fixed-size sample of a stream (Algorithm R).
#[derive(Debug, Clone)]
pub struct Reservoir {
    capacity: usize,
    seen: u64,
    sample: Vec<f64>,
    rng: ChaCha8Rng,
}

impl Reservoir {
    pub fn new(capacity: usize, seed: u64) -> Self {
        assert!(capacity >= 1);
        Self {
            capacity,
            seen: 0,
            sample: Vec::with_capacity(capacity),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn push(&mut self, x: f64) {
        self.seen += 1;
        if self.sample.len() < self.capacity {
            self.sample.push(x);
        } else {
            let j = self.rng.random_range(0..self.seen);
            if (j as usize) < self.capacity {
                self.sample[j as usize] = x;
            }
        }
    }

    pub fn seen(&self) -> u64 {
        self.seen
    }

    /// True when every pushed value is retained.
    pub fn is_exact(&self) -> bool {
        self.seen as usize <= self.capacity
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.sample.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Linear-interpolation quantiles (`h = (n-1)p`) of already sorted data.
pub fn quantiles_of_sorted(sorted: &[f64], probs: &[f64]) -> Vec<f64> {
    let n = sorted.len();
    probs
        .iter()
        .map(|&p| {
            let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        })
        .collect()
}

/// Quantiles of a uniform reservoir sample of the column's valid values.
///
/// Exact when the column has at most `reservoir_size` valid values.
pub fn quantile_estimates(
    column: &Column,
    probs: &[f64],
    reservoir_size: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut r = Reservoir::new(reservoir_size, seed);
    column.valid_values().for_each(|x| r.push(x));
    if r.seen() == 0 {
        return Err(Error::EmptyColumn);
    }
    Ok(quantiles_of_sorted(&r.sorted(), probs))
}
