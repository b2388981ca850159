//! Insights near a chosen one, and the class-wide correlation overview.
//!
//! `cargo run -p insight-core --example neighborhood_overview`

use insight_core::synth::{generate, SynthSpec};
use insight_core::{Engine, EngineConfig, InsightClass, InsightQuery, Mode};

fn main() -> Result<(), insight_core::Error> {
    let spec = SynthSpec {
        rows: 2_000,
        cols: 6,
        plants: vec!["rho:0.8:a,b".parse()?, "rho:0.4:b,c".parse()?],
        seed: 9,
    };
    let engine = Engine::new(generate(&spec)?.0, EngineConfig::default());

    let focus = engine
        .rank(&InsightQuery::new(InsightClass::LinearRelationship).limit(1))?
        .remove(0);
    println!("focus {:?} {:.3}", focus.tuple, focus.value);
    for s in engine.neighborhood(&focus, 4)? {
        println!(
            "  {:?} {:.3}  similarity {:.3}",
            s.insight.tuple, s.insight.value, s.similarity
        );
    }

    let ov = engine.overview(InsightClass::LinearRelationship, Mode::Exact);
    if let insight_core::Overview::Matrix { attributes, .. } = &ov {
        print!("\n{:>4}", "");
        for a in attributes {
            print!("{a:>7}");
        }
        println!();
        for (i, a) in attributes.iter().enumerate() {
            print!("{a:>4}");
            for j in 0..attributes.len() {
                print!("{:>7.2}", ov.cell(i, j).unwrap_or(f64::NAN));
            }
            println!();
        }
    }
    Ok(())
}
