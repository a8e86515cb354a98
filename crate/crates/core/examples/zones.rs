//! Zones of every state, alongside the regions they were merged from.
//!
//! `cargo run --example zones [model.json]`

use tfa_estimate::zones::{build_zones, regions};
use tfa_estimate::Tfa;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fig1.json").into());
    let model = Tfa::load(&path)?;
    for x in model.states() {
        let show = |v: Vec<tfa_estimate::Interval>| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
        println!("{}", model.state_name(x));
        println!("  regions: {}", show(regions(&model, x)));
        println!("  zones:   {}", show(build_zones(&model, x)));
    }
    Ok(())
}
