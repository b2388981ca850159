//! Exact against sketch-based all-pairs correlation on independent columns.
//!
//! `cargo run --release -p insight-core --example bench [rows] [cols]`

use insight_core::bench;
use insight_core::synth::{generate, SynthSpec};

fn main() -> Result<(), insight_core::Error> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("integer argument"));
    let rows = args.next().unwrap_or(50_000);
    let cols = args.next().unwrap_or(50);
    let (ds, _) = generate(&SynthSpec {
        rows,
        cols,
        plants: Vec::new(),
        seed: 0,
    })?;
    let r = bench::run(&ds, 256, 0, 3);
    println!(
        "{rows} rows × {cols} columns, {} pairs, k = {}",
        r.pairs, r.k
    );
    println!("exact all-pairs   {:>9.2} ms", r.exact_pairwise_ms);
    println!("sketch build      {:>9.2} ms", r.sketch_build_ms);
    println!(
        "sketch all-pairs  {:>9.3} ms  ({:.0}x)",
        r.sketch_pairwise_ms, r.pairwise_speedup
    );
    println!("end to end        {:>9.2}x", r.end_to_end_speedup);
    println!("mean |error|      {:>9.4}", r.mean_abs_error);
    Ok(())
}
