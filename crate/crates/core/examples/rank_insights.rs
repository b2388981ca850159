//! Top-k queries per insight class, with fixed-attribute and metric-range
//! constraints, in exact and sketch mode.
//!
//! `cargo run -p insight-core --example rank_insights`

use insight_core::synth::{generate, SynthSpec};
use insight_core::{Engine, EngineConfig, InsightClass, InsightQuery, Mode};

fn main() -> Result<(), insight_core::Error> {
    let plants = [
        "rho:0.85:hours,leisure",
        "rho:0.55:income,life",
        "skew:2.5:wealth",
        "hh:0.5:region",
    ];
    let spec = SynthSpec {
        rows: 5_000,
        cols: 10,
        plants: plants.iter().map(|p| p.parse()).collect::<Result<_, _>>()?,
        seed: 4,
    };
    let (ds, _) = generate(&spec)?;
    let engine = Engine::new(ds, EngineConfig::default());

    for class in InsightClass::ALL {
        let top = engine.rank(&InsightQuery::new(class).limit(2))?;
        let shown: Vec<String> = top
            .iter()
            .map(|d| format!("{} {:.3}", d.tuple.join("/"), d.value))
            .collect();
        println!("{:<26} {}", class.as_str(), shown.join(", "));
    }

    let q = InsightQuery::new(InsightClass::LinearRelationship)
        .fix("income")
        .limit(3);
    println!("\ncorrelated with income:");
    for d in engine.rank(&q)? {
        println!("  {:?} {:.3}", d.tuple, d.value);
    }
    let q = InsightQuery::new(InsightClass::LinearRelationship)
        .range(0.3, 0.7)
        .mode(Mode::Sketch);
    println!("|ρ| in [0.3, 0.7], from sketches:");
    for d in engine.rank(&q)? {
        println!(
            "  {:?} {:.3} (approximate: {})",
            d.tuple, d.value, d.approximate
        );
    }
    Ok(())
}
