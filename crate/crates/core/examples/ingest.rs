//! Reads a CSV (a path argument, or a built-in sample), infers column kinds
//! and prints a profile of each column.
//!
//! `cargo run -p insight-core --example ingest [file.csv]`

use insight_core::{ingest_csv, ColumnKind, CsvOptions, MomentSummary};

const SAMPLE: &str = "\
country,hours,leisure,income,region
AU,13.0,14.4,32759,oceania
AT,6.7,14.5,27541,europe
BE,4.6,15.7,28307,europe
CA,3.7,14.2,29365,americas
CL,15.2,,15880,americas
CZ,6.1,14.9,18404,europe
DK,2.2,16.1,26491,europe
EE,3.6,14.9,15167,europe
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = match std::env::args().nth(1) {
        Some(path) => ingest_csv(&path, std::fs::File::open(&path)?, &CsvOptions::default())?,
        None => ingest_csv("sample", SAMPLE.as_bytes(), &CsvOptions::default())?,
    };
    println!(
        "{}: {} rows, fingerprint {}",
        ds.name(),
        ds.n_rows(),
        ds.fingerprint_hex()
    );
    for c in ds.columns() {
        match c.kind() {
            ColumnKind::Numeric => {
                let s = MomentSummary::of_column(c);
                println!(
                    "  {:<10} numeric      {:>3} valid  min {} max {}",
                    c.name(),
                    c.valid_count(),
                    s.min,
                    s.max
                );
            }
            ColumnKind::Categorical => {
                let (_, dict) = c.as_categorical().expect("categorical");
                println!(
                    "  {:<10} categorical  {:>3} valid  {} distinct",
                    c.name(),
                    c.valid_count(),
                    dict.len()
                );
            }
        }
    }
    Ok(())
}
