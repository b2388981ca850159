mod common;

use common::random_dataset;
use insight_core::sketch::{
    build_hyperplane, estimate_correlation, hamming, merge_hyperplane, quantile_estimates,
    read_sketch, write_sketch, FrequentItemsSketch, HyperplaneConfig,
};
use insight_core::{Column, ColumnKind, MomentSummary};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

/// Sorted random cut points splitting `0..n` into `parts` contiguous ranges.
fn partition(n: usize, parts: usize, rng: &mut ChaCha8Rng) -> Vec<std::ops::Range<usize>> {
    let mut cuts: Vec<usize> = (0..parts - 1).map(|_| rng.random_range(0..=n)).collect();
    cuts.push(0);
    cuts.push(n);
    cuts.sort_unstable();
    cuts.windows(2).map(|w| w[0]..w[1]).collect()
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn partitioned_sketches_merge_to_single_pass() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for seed in 0..50 {
        let ds = random_dataset(1000 + seed, 6, 3000);
        let cfg = HyperplaneConfig::new(rng.random_range(1..5) * 64, seed);
        let parts = partition(ds.n_rows(), rng.random_range(2..=8), &mut rng);
        for (i, c) in ds.columns().iter().enumerate() {
            if c.kind() != ColumnKind::Numeric {
                continue;
            }
            let whole = build_hyperplane(c, i as u32, &cfg, 0..ds.n_rows());
            let merged = parts
                .iter()
                .map(|r| build_hyperplane(c, i as u32, &cfg, r.clone()))
                .reduce(|a, b| merge_hyperplane(&a, &b).unwrap())
                .unwrap();
            assert_eq!(merged.row_count, whole.row_count);
            match (whole.finalize(), merged.finalize()) {
                (Ok(a), Ok(b)) => assert_eq!(a, b, "dataset {seed} column {i}"),
                (Err(_), Err(_)) => {}
                other => panic!("finalize disagrees: {other:?}"),
            }

            let m = MomentSummary::of_column(c);
            let parts_m = parts
                .iter()
                .map(|r| MomentSummary::of_rows(c, r.clone()))
                .fold(MomentSummary::zero(), |a, b| a.merge(&b));
            assert_eq!(parts_m.count, m.count);
            for (a, b) in [
                (parts_m.sum1(), m.sum1()),
                (parts_m.sum2(), m.sum2()),
                (parts_m.sum3(), m.sum3()),
                (parts_m.sum4(), m.sum4()),
            ] {
                assert!(rel_close(a, b), "{a} vs {b}");
            }
        }
    }
}

#[test]
fn space_saving_bounds_on_zipf() {
    let n = 100_000u64;
    let m = 64;
    let zipf = Zipf::new(10_000.0, 1.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let labels: Vec<String> = (0..n)
        .map(|_| format!("v{}", zipf.sample(&mut rng) as u64))
        .collect();
    let col = Column::categorical("z", labels.iter().map(|s| Some(s.as_str())));
    let (codes, dict) = col.as_categorical().unwrap();
    let mut exact = vec![0u64; dict.len()];
    for c in codes {
        exact[*c as usize] += 1;
    }
    let sketch = FrequentItemsSketch::of_column(&col, m);
    assert_eq!(sketch.processed(), n);
    for t in sketch.top(m) {
        let truth = exact[t.item as usize];
        assert!(t.count >= truth);
        assert!(
            t.count - truth <= n / m as u64,
            "overcount {}",
            t.count - truth
        );
        assert!(t.error <= n / m as u64);
        assert!(t.count - t.error <= truth);
    }
    let mut sorted = exact.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let truth = sorted.iter().take(3).sum::<u64>() as f64 / n as f64;
    let est = sketch.rel_freq_estimate(3).unwrap();
    assert!((est - truth).abs() <= 3.0 / m as f64, "{est} vs {truth}");
}

#[test]
fn reservoir_quantiles_are_exact_below_capacity() {
    let col = Column::numeric("x", (1..=101).map(|i| Some(i as f64)));
    let q = quantile_estimates(&col, &[0.0, 0.25, 0.5, 1.0], 4096, 1).unwrap();
    assert_eq!(q, vec![1.0, 26.0, 51.0, 101.0]);
}

#[test]
fn reservoir_quantiles_track_large_columns() {
    let col = Column::numeric("x", (0..200_000).map(|i| Some(i as f64)));
    let q = quantile_estimates(&col, &[0.25, 0.5, 0.75], 4096, 1).unwrap();
    for (got, p) in q.iter().zip([0.25, 0.5, 0.75]) {
        assert!((got / 200_000.0 - p).abs() < 0.03, "{got}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn persisted_sketch_round_trips(seed in any::<u64>(), words in 1usize..5, n in 1usize..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let col = Column::numeric("x", (0..n).map(|_| rng.random_bool(0.9).then(|| rng.random_range(-1e6..1e6))));
        let s = build_hyperplane(&col, 3, &HyperplaneConfig::new(words * 64, seed), 0..n);
        let mut buf = Vec::new();
        write_sketch(&mut buf, &s).unwrap();
        prop_assert_eq!(read_sketch(buf.as_slice()).unwrap(), s);
    }

    #[test]
    fn estimate_is_symmetric_and_bounded(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = HyperplaneConfig::new(128, seed);
        let a = Column::numeric("a", (0..100).map(|_| Some(rng.random_range(-1.0..1.0))));
        let b = Column::numeric("b", (0..100).map(|_| Some(rng.random_range(-1.0..1.0))));
        let (sa, sb) = (
            build_hyperplane(&a, 0, &cfg, 0..100).finalize().unwrap(),
            build_hyperplane(&b, 1, &cfg, 0..100).finalize().unwrap(),
        );
        let r = estimate_correlation(&sa, &sb).unwrap();
        prop_assert_eq!(r, estimate_correlation(&sb, &sa).unwrap());
        prop_assert!((-1.0..=1.0).contains(&r));
        prop_assert_eq!(hamming(&sa, &sa).unwrap(), 0);
        prop_assert_eq!(estimate_correlation(&sa, &sa).unwrap(), 1.0);
    }
}
