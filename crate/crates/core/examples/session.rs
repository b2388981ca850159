//! An exploration session: focus an insight, constrain a class, save the
//! state and load it back.
//!
//! `cargo run -p insight-core --example session`

use insight_core::synth::{generate, SynthSpec};
use insight_core::{Engine, EngineConfig, ExplorationState, InsightClass, InsightQuery};

fn show(state: &ExplorationState, class: InsightClass) {
    let recs: Vec<String> = state.recommendations[&class]
        .iter()
        .take(4)
        .map(|d| d.tuple.join("/"))
        .collect();
    println!("  {class}: {}", recs.join(", "));
}

fn main() -> Result<(), insight_core::Error> {
    let spec = SynthSpec {
        rows: 1_500,
        cols: 8,
        plants: vec![
            "rho:0.9:work,leisure".parse()?,
            "rho:0.6:income,life".parse()?,
            "skew:2:wealth".parse()?,
        ],
        seed: 5,
    };
    let engine = Engine::new(generate(&spec)?.0, EngineConfig::default());
    let mut state = ExplorationState::new(&engine)?;
    println!("fresh:");
    show(&state, InsightClass::LinearRelationship);

    let focus = state.recommendations[&InsightClass::Skew][0].clone();
    state.focus(&engine, focus.clone())?;
    println!("focused on {:?}:", focus.tuple);
    show(&state, InsightClass::LinearRelationship);

    state.set_constraint(
        &engine,
        InsightQuery::new(InsightClass::LinearRelationship).range(0.0, 0.5),
    )?;
    println!("with |ρ| ≤ 0.5:");
    show(&state, InsightClass::LinearRelationship);

    let doc = state.save();
    let back = ExplorationState::load(&doc, &engine)?;
    println!(
        "saved {} bytes, reloads equal: {}",
        doc.len(),
        back == state
    );
    Ok(())
}
