//! Timing of exact versus sketch-based all-pairs correlation.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::{Column, ColumnKind, Dataset};
use crate::metrics::CoMoments;
use crate::sketch::{
    build_hyperplanes_sequential, estimate_all_pairs, HyperplaneConfig, SignVector, SymmetricMatrix,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub n_rows: usize,
    pub n_numeric: usize,
    pub pairs: usize,
    pub k: usize,
    pub seed: u64,
    pub repeats: usize,
    /// Best-of-`repeats` wall time of the exact all-pairs pass over the raw columns.
    pub exact_pairwise_ms: f64,
    /// Building and finalizing one sign vector per column.
    pub sketch_build_ms: f64,
    /// Estimating every pair from finalized sign vectors.
    pub sketch_pairwise_ms: f64,
    /// `exact_pairwise_ms / sketch_pairwise_ms`.
    pub pairwise_speedup: f64,
    /// `exact_pairwise_ms / (sketch_build_ms + sketch_pairwise_ms)`.
    pub end_to_end_speedup: f64,
    /// Mean |estimate − exact| over defined pairs.
    pub mean_abs_error: f64,
    pub sign_bytes: usize,
}

/// Exact Pearson ρ for every pair of numeric columns (single-threaded).
///
/// Null-free columns are standardized once and paired by dot product; columns
/// with nulls fall back to a per-pair pass over jointly valid rows.
/// Undefined pairs are NaN.
pub fn exact_all_pairs(ds: &Dataset) -> SymmetricMatrix {
    let cols: Vec<_> = ds
        .indices_of_kind(ColumnKind::Numeric)
        .into_iter()
        .map(|i| ds.column(i))
        .collect();
    let d = cols.len();
    let standardized: Vec<Option<Vec<f64>>> = cols
        .iter()
        .map(|c| {
            if c.has_nulls() {
                return None;
            }
            let xs = c.as_numeric()?;
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
            if ss <= 0.0 {
                return Some(Vec::new());
            }
            let inv = 1.0 / ss.sqrt();
            Some(xs.iter().map(|x| (x - mean) * inv).collect())
        })
        .collect();
    let mut m = SymmetricMatrix::identity(d);
    for i in 0..d {
        for j in i + 1..d {
            let r = match (&standardized[i], &standardized[j]) {
                (Some(a), Some(b)) if a.is_empty() || b.is_empty() => f64::NAN,
                (Some(a), Some(b)) if a.len() < crate::metrics::MIN_PAIR_SUPPORT => f64::NAN,
                (Some(a), Some(b)) => a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| x * y)
                    .sum::<f64>()
                    .clamp(-1.0, 1.0),
                _ => {
                    let (x, y) = (cols[i], cols[j]);
                    CoMoments::of_columns(
                        x.as_numeric().expect("numeric"),
                        y.as_numeric().expect("numeric"),
                        x.validity(),
                        y.validity(),
                    )
                    .correlation()
                    .unwrap_or(f64::NAN)
                }
            };
            m.set(i, j, r);
        }
    }
    m
}

/// One finalized sign vector per numeric column (single-threaded).
///
/// Each row's hyperplane components are drawn once and shared by all columns.
pub fn sign_vectors(ds: &Dataset, cfg: &HyperplaneConfig) -> Vec<SignVector> {
    let cols: Vec<(u32, &Column)> = ds
        .indices_of_kind(ColumnKind::Numeric)
        .into_iter()
        .map(|i| (i as u32, ds.column(i)))
        .collect();
    build_hyperplanes_sequential(&cols, cfg, 0..ds.n_rows())
        .iter()
        .map(|s| s.finalize().unwrap_or_else(|_| SignVector::zeros(cfg.k)))
        .collect()
}

fn best_ms<T>(repeats: usize, mut f: impl FnMut() -> T) -> (f64, T) {
    let mut best = f64::INFINITY;
    let mut out = None;
    for _ in 0..repeats.max(1) {
        let t = Instant::now();
        let v = f();
        best = best.min(t.elapsed().as_secs_f64() * 1e3);
        out = Some(v);
    }
    (best, out.expect("at least one run"))
}

pub fn run(ds: &Dataset, k: usize, seed: u64, repeats: usize) -> BenchReport {
    let cfg = HyperplaneConfig::new(k, seed);
    let (exact_ms, exact) = best_ms(repeats, || exact_all_pairs(ds));
    let (build_ms, signs) = best_ms(1, || sign_vectors(ds, &cfg));
    let (pair_ms, approx) = best_ms(repeats, || {
        estimate_all_pairs(&signs).expect("equal widths")
    });
    let d = signs.len();
    let mut err = 0.0;
    let mut defined = 0usize;
    for i in 0..d {
        for j in i + 1..d {
            let e = exact.get(i, j);
            if e.is_finite() {
                err += (approx.get(i, j) - e).abs();
                defined += 1;
            }
        }
    }
    // Timer resolution floor so the ratio stays finite.
    let pair_floor = pair_ms.max(1e-6);
    BenchReport {
        n_rows: ds.n_rows(),
        n_numeric: d,
        pairs: d * d.saturating_sub(1) / 2,
        k,
        seed,
        repeats: repeats.max(1),
        exact_pairwise_ms: exact_ms,
        sketch_build_ms: build_ms,
        sketch_pairwise_ms: pair_ms,
        pairwise_speedup: exact_ms / pair_floor,
        end_to_end_speedup: exact_ms / (build_ms + pair_floor),
        mean_abs_error: if defined > 0 {
            err / defined as f64
        } else {
            0.0
        },
        sign_bytes: d * k.div_ceil(8),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_matrix_matches_pairwise_pass() {
        let a: Vec<f64> = (0..200).map(|i| (i as f64 * 0.37).sin()).collect();
        let b: Vec<f64> = a
            .iter()
            .enumerate()
            .map(|(i, x)| x + (i % 7) as f64 * 0.1)
            .collect();
        let c = Column::numeric("c", (0..200).map(|i| (i % 5 != 0).then_some(i as f64)));
        let ds = Dataset::new(
            "t",
            vec![
                Column::numeric("a", a.iter().map(|v| Some(*v))),
                Column::numeric("b", b.iter().map(|v| Some(*v))),
                c,
                Column::numeric("k", (0..200).map(|_| Some(1.0))),
            ],
        )
        .unwrap();
        let m = exact_all_pairs(&ds);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let want = crate::metrics::pearson(ds.column(i), ds.column(j))
                .signed
                .unwrap();
            assert!((m.get(i, j) - want).abs() < 1e-12);
        }
        assert!(m.get(0, 3).is_nan());
    }

    #[test]
    fn report_is_filled() {
        let ds = Dataset::new(
            "t",
            (0..4)
                .map(|c| {
                    Column::numeric(
                        format!("x{c}"),
                        (0..500).map(move |i| Some(((i * (c + 3)) % 17) as f64)),
                    )
                })
                .collect(),
        )
        .unwrap();
        let r = run(&ds, 128, 1, 2);
        assert_eq!(r.pairs, 6);
        assert_eq!(r.sign_bytes, 4 * 16);
        assert!(r.pairwise_speedup > 0.0);
        assert!(r.mean_abs_error < 0.5);
    }
}
