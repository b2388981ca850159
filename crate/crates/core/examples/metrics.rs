//! Single-pass moment summaries and the metrics derived from them, including
//! merging summaries of two halves of a column.
//!
//! `cargo run -p insight-core --example metrics`

use insight_core::metrics::{self, OutlierConfig};
use insight_core::{Column, MomentSummary};

fn main() {
    // A right-skewed column with one far outlier.
    let mut values: Vec<f64> = (1..=200).map(|i| (i as f64 / 40.0).exp()).collect();
    values.push(1e4);
    let col = Column::numeric("x", values.iter().map(|v| Some(*v)));

    let whole = MomentSummary::of_column(&col);
    let halves = MomentSummary::of_rows(&col, 0..100)
        .merge(&MomentSummary::of_rows(&col, 100..values.len()));
    println!("count {} (merged halves: {})", whole.count, halves.count);

    println!("variance       {:?}", metrics::variance(&whole).value);
    println!("skewness       {:?}", metrics::skewness(&whole).signed);
    println!("kurtosis       {:?}", metrics::kurtosis(&whole).value);
    let out = metrics::outlier_score(&col, &whole, &OutlierConfig::default());
    println!("outlier score  {:?}", out.value);

    let y = Column::numeric("y", values.iter().map(|v| Some(v.ln())));
    println!("pearson(x, ln x)  {:?}", metrics::pearson(&col, &y).signed);
    println!("spearman(x, ln x) {:?}", metrics::spearman(&col, &y).signed);

    let cat = Column::categorical("c", ["a", "a", "a", "b", "b", "c"].map(Some));
    println!(
        "top-1 share of c  {:?}",
        metrics::rel_freq_topk(&cat, 1).value
    );
}
