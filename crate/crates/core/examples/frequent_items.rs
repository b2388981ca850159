//! Space-Saving counters over a skewed categorical column.
//!
//! `cargo run -p insight-core --example frequent_items`

use insight_core::{metrics, Column, FrequentItemsSketch};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

fn main() {
    let zipf = Zipf::new(5_000.0, 1.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let labels: Vec<String> = (0..50_000)
        .map(|_| format!("item{}", zipf.sample(&mut rng) as u64))
        .collect();
    let col = Column::categorical("item", labels.iter().map(|s| Some(s.as_str())));
    let (_, dict) = col.as_categorical().unwrap();

    let sketch = FrequentItemsSketch::of_column(&col, 64);
    println!(
        "{} rows, {} distinct, 64 counters",
        sketch.processed(),
        dict.len()
    );
    for t in sketch.top(5) {
        println!(
            "  {:<10} count ≤ {:>5}, overcount ≤ {}",
            dict[t.item as usize], t.count, t.error
        );
    }
    println!(
        "top-3 share, sketch {:.4}",
        sketch.rel_freq_estimate(3).unwrap()
    );
    println!(
        "top-3 share, exact  {:.4}",
        metrics::rel_freq_topk(&col, 3).value.unwrap()
    );
}
