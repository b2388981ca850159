//! Synthetic data with planted structure, and what the sample shows.
//!
//! `cargo run -p insight-core --example synth`

use insight_core::synth::{generate, SynthSpec};
use insight_core::{write_csv, CsvOptions};

fn main() -> Result<(), insight_core::Error> {
    let plants = [
        "rho:0.9:a,b",
        "skew:-2:s",
        "tails:5:t",
        "hh:0.4:h",
        "outlier:8:o",
    ];
    let spec = SynthSpec {
        rows: 10_000,
        cols: 9,
        plants: plants.iter().map(|p| p.parse()).collect::<Result<_, _>>()?,
        seed: 1,
    };
    let (ds, truth) = generate(&spec)?;
    println!("columns: {}", truth.columns.join(", "));
    for r in &truth.realized {
        println!(
            "  {:<50} measured {:?}",
            serde_json::to_string(&r.plant).unwrap(),
            r.measured
        );
    }
    let mut head = Vec::new();
    write_csv(&ds, &mut head, &CsvOptions::default())?;
    let text = String::from_utf8_lossy(&head);
    for line in text.lines().take(4) {
        println!("{line}");
    }
    Ok(())
}
