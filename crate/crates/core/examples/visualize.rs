//! Chart payloads for the top insight of each class.
//!
//! `cargo run -p insight-core --example visualize`

use insight_core::synth::{generate, SynthSpec};
use insight_core::{Engine, EngineConfig, InsightClass, InsightQuery, VisualizationPayload};

fn main() -> Result<(), insight_core::Error> {
    let plants = ["rho:0.7:a,b", "skew:1.5:s", "outlier:9:o", "hh:0.35:h"];
    let spec = SynthSpec {
        rows: 3_000,
        cols: 6,
        plants: plants.iter().map(|p| p.parse()).collect::<Result<_, _>>()?,
        seed: 2,
    };
    let engine = Engine::new(generate(&spec)?.0, EngineConfig::default());

    for class in [
        InsightClass::Skew,
        InsightClass::Outliers,
        InsightClass::HeterogeneousFrequencies,
        InsightClass::LinearRelationship,
    ] {
        let top = engine.rank(&InsightQuery::new(class).limit(1))?.remove(0);
        match engine.visualize(&top)? {
            VisualizationPayload::Histogram {
                attribute, counts, ..
            } => {
                println!(
                    "histogram of {attribute}: {} bins, tallest {}",
                    counts.len(),
                    counts.iter().max().unwrap()
                );
            }
            VisualizationPayload::BoxPlot {
                attribute,
                median,
                q1,
                q3,
                outlier_count,
                ..
            } => {
                println!("box plot of {attribute}: q1 {q1:.2}, median {median:.2}, q3 {q3:.2}, {outlier_count} outliers");
            }
            VisualizationPayload::ParetoChart {
                attribute, bars, ..
            } => {
                let b = &bars[0];
                println!(
                    "pareto of {attribute}: top {:?} holds {:.1}%",
                    b.label,
                    100.0 * b.share
                );
            }
            VisualizationPayload::ScatterWithFitLine {
                x_attribute,
                y_attribute,
                points,
                slope,
                intercept,
                ..
            } => {
                println!(
                    "scatter {x_attribute} vs {y_attribute}: {} points, y = {:.3}x + {:.3}",
                    points.len(),
                    slope.unwrap_or(f64::NAN),
                    intercept.unwrap_or(f64::NAN)
                );
            }
        }
    }
    Ok(())
}
