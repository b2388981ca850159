use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::Column;
use crate::error::{Error, Result};

use super::bits::SignVector;

/// Rows per independently built block when sketching in parallel.
const ROW_BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperplaneConfig {
    pub k: usize,
    pub seed: u64,
}

impl HyperplaneConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        assert!(k >= 1, "sketch width must be at least 1");
        Self { k, seed }
    }

    /// `max(64, ⌈log₂²n⌉)` rounded up to a multiple of 64.
    pub fn default_k(n_rows: usize) -> usize {
        let lg = (n_rows.max(2) as f64).log2();
        let k = ((lg * lg).ceil() as usize).max(64);
        k.div_ceil(64) * 64
    }

    pub fn for_rows(n_rows: usize, seed: u64) -> Self {
        Self::new(Self::default_k(n_rows), seed)
    }
}

/// Deterministic source of the hyperplane components `r[i][j]`.
///
/// Row `j` owns ChaCha stream `j` under key `seed`; `r[i][j]` is the `i`-th
/// standard normal drawn from that stream. Nothing of size `n` is ever stored,
/// and any row range can be regenerated independently.
#[derive(Debug, Clone)]
pub struct NormalStream {
    base: ChaCha8Rng,
    k: usize,
}

impl NormalStream {
    pub fn new(cfg: &HyperplaneConfig) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(cfg.seed),
            k: cfg.k,
        }
    }

    /// Fills `out` (length `k`) with `r[0..k][row]`.
    pub fn row_into(&self, row: usize, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.k);
        let mut rng = self.base.clone();
        rng.set_stream(row as u64);
        rng.set_word_pos(0);
        for v in out.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.k];
        self.row_into(row, &mut out);
        out
    }
}

/// Pre-sign partial sums for one numeric column over some set of rows.
///
/// Values enter as `b - offset`, where `offset` is the column's first valid
/// value; centering is unaffected and the subtraction at finalize loses less.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneSketch {
    pub column_id: u32,
    pub config: HyperplaneConfig,
    pub offset: f64,
    /// `Σⱼ (bⱼ - offset)·r[i][j]`
    pub dots: Vec<f64>,
    /// `Σⱼ r[i][j]` over the same rows.
    pub rsums: Vec<f64>,
    /// `Σⱼ (bⱼ - offset)`
    pub value_sum: f64,
    pub row_count: u64,
}

impl HyperplaneSketch {
    pub fn empty(column_id: u32, config: HyperplaneConfig, offset: f64) -> Self {
        Self {
            column_id,
            config,
            offset,
            dots: vec![0.0; config.k],
            rsums: vec![0.0; config.k],
            value_sum: 0.0,
            row_count: 0,
        }
    }

    pub fn merge(&self, other: &Self) -> Result<Self> {
        merge_hyperplane(self, other)
    }

    /// Mean of the column over the sketched rows.
    pub fn mean(&self) -> Option<f64> {
        (self.row_count > 0).then(|| self.offset + self.value_sum / self.row_count as f64)
    }

    /// Sign of `b̃·rᵢ = b·rᵢ - μ(1·rᵢ)` for each hyperplane; zero maps to bit 1.
    pub fn finalize(&self) -> Result<SignVector> {
        if self.row_count == 0 {
            return Err(Error::EmptySketch);
        }
        let shifted_mean = self.value_sum / self.row_count as f64;
        Ok(SignVector::from_fn(self.config.k, |i| {
            self.dots[i] - shifted_mean * self.rsums[i] >= 0.0
        }))
    }

    /// Size of the finalized sketch in bits (`k` per column).
    pub fn sign_bits(&self) -> usize {
        self.config.k
    }
}

fn column_offset(column: &Column) -> f64 {
    column.valid_values().next().unwrap_or(0.0)
}

pub fn merge_hyperplane(a: &HyperplaneSketch, b: &HyperplaneSketch) -> Result<HyperplaneSketch> {
    if a.column_id != b.column_id {
        return Err(Error::Merge(format!(
            "column {} vs {}",
            a.column_id, b.column_id
        )));
    }
    if a.config != b.config {
        return Err(Error::Merge(format!(
            "config {:?} vs {:?}",
            a.config, b.config
        )));
    }
    if a.offset.to_bits() != b.offset.to_bits() {
        return Err(Error::Merge(format!("offset {} vs {}", a.offset, b.offset)));
    }
    Ok(HyperplaneSketch {
        column_id: a.column_id,
        config: a.config,
        offset: a.offset,
        dots: a.dots.iter().zip(&b.dots).map(|(x, y)| x + y).collect(),
        rsums: a.rsums.iter().zip(&b.rsums).map(|(x, y)| x + y).collect(),
        value_sum: a.value_sum + b.value_sum,
        row_count: a.row_count + b.row_count,
    })
}

/// Sketches one numeric column over `rows`.
pub fn build_hyperplane(
    column: &Column,
    column_id: u32,
    cfg: &HyperplaneConfig,
    rows: Range<usize>,
) -> HyperplaneSketch {
    build_hyperplanes(&[(column_id, column)], cfg, rows)
        .pop()
        .expect("one column in, one sketch out")
}

fn accumulate(
    columns: &[(u32, &Column)],
    stream: &NormalStream,
    rows: Range<usize>,
    out: &mut [HyperplaneSketch],
) {
    let k = stream.k;
    let mut r = vec![0.0; k];
    let values: Vec<&[f64]> = columns
        .iter()
        .map(|(_, c)| {
            c.as_numeric()
                .expect("hyperplane sketches need numeric columns")
        })
        .collect();
    for row in rows {
        if !columns.iter().any(|(_, c)| c.is_valid(row)) {
            continue;
        }
        stream.row_into(row, &mut r);
        for ((sk, (_, col)), vals) in out.iter_mut().zip(columns).zip(&values) {
            if !col.is_valid(row) {
                continue;
            }
            let v = vals[row] - sk.offset;
            for ((d, s), ri) in sk.dots.iter_mut().zip(sk.rsums.iter_mut()).zip(&r) {
                *d += v * ri;
                *s += ri;
            }
            sk.value_sum += v;
            sk.row_count += 1;
        }
    }
}

/// Sketches several numeric columns in one pass, generating each row's
/// hyperplane components once and sharing them across columns.
///
/// Rows are processed in fixed blocks (in parallel) and merged in row order,
/// so the result does not depend on thread count.
pub fn build_hyperplanes(
    columns: &[(u32, &Column)],
    cfg: &HyperplaneConfig,
    rows: Range<usize>,
) -> Vec<HyperplaneSketch> {
    build_blocks(columns, cfg, rows, true)
}

/// [`build_hyperplanes`] on the calling thread only; same output.
pub fn build_hyperplanes_sequential(
    columns: &[(u32, &Column)],
    cfg: &HyperplaneConfig,
    rows: Range<usize>,
) -> Vec<HyperplaneSketch> {
    build_blocks(columns, cfg, rows, false)
}

fn build_blocks(
    columns: &[(u32, &Column)],
    cfg: &HyperplaneConfig,
    rows: Range<usize>,
    parallel: bool,
) -> Vec<HyperplaneSketch> {
    use rayon::prelude::*;

    let stream = NormalStream::new(cfg);
    let fresh = || -> Vec<HyperplaneSketch> {
        columns
            .iter()
            .map(|(id, c)| HyperplaneSketch::empty(*id, *cfg, column_offset(c)))
            .collect()
    };
    let blocks: Vec<Range<usize>> = (rows.start..rows.end)
        .step_by(ROW_BLOCK)
        .map(|s| s..(s + ROW_BLOCK).min(rows.end))
        .collect();
    let one = |block: Range<usize>| {
        let mut out = fresh();
        accumulate(columns, &stream, block, &mut out);
        out
    };
    let partials: Vec<Vec<HyperplaneSketch>> = if parallel {
        blocks.into_par_iter().map(one).collect()
    } else {
        blocks.into_iter().map(one).collect()
    };
    partials.into_iter().fold(fresh(), |acc, part| {
        acc.iter()
            .zip(&part)
            .map(|(a, b)| merge_hyperplane(a, b).expect("same columns and config"))
            .collect()
    })
}
