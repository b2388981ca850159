//! Random-hyperplane sign sketches: build per column, merge partitions, and
//! estimate correlations from Hamming distance.
//!
//! `cargo run -p insight-core --example hyperplane_sketch`

use insight_core::sketch::{
    build_hyperplane, estimate_correlation, merge_hyperplane, HyperplaneConfig,
};
use insight_core::{metrics, Column};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() {
    let n = 20_000;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|v| 0.7 * v + 0.714 * Distribution::<f64>::sample(&StandardNormal, &mut rng))
        .collect();
    let (cx, cy) = (
        Column::numeric("x", x.iter().map(|v| Some(*v))),
        Column::numeric("y", y.iter().map(|v| Some(*v))),
    );

    let cfg = HyperplaneConfig::new(512, 7);
    let sx = build_hyperplane(&cx, 0, &cfg, 0..n);
    // The same sketch from two row partitions, merged.
    let sy = merge_hyperplane(
        &build_hyperplane(&cy, 1, &cfg, 0..n / 3),
        &build_hyperplane(&cy, 1, &cfg, n / 3..n),
    )
    .unwrap();
    assert_eq!(
        sy.finalize().unwrap(),
        build_hyperplane(&cy, 1, &cfg, 0..n).finalize().unwrap()
    );

    let (bx, by) = (sx.finalize().unwrap(), sy.finalize().unwrap());
    println!("k = {} bits per column ({} bytes)", cfg.k, cfg.k / 8);
    println!("estimated ρ {:.3}", estimate_correlation(&bx, &by).unwrap());
    println!(
        "exact ρ     {:.3}",
        metrics::pearson(&cx, &cy).signed.unwrap()
    );
}
