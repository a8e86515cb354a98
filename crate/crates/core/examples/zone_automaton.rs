//! Builds the zone automaton and prints it as Graphviz.
//!
//! `cargo run --example zone_automaton [model.json] | dot -Tsvg > za.svg`

use tfa_estimate::{Label, Tfa, ZoneAutomaton};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fig1.json").into());
    let model = Tfa::load(&path)?;
    let za = ZoneAutomaton::build(&model)?;
    let events = za.edges().iter().filter(|e| e.label != Label::Tau).count();
    eprintln!("{} extended states, {} event edges", za.node_count(), events);
    print!("{}", za.to_dot(&model));
    Ok(())
}
