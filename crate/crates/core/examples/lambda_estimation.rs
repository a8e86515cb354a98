//! Extended states reachable from the initial state without observable
//! events, at one representative time per region of [0,2].
//!
//! `cargo run --example lambda_estimation`

use tfa_estimate::estimate::{lambda_estimation, Estimate};
use tfa_estimate::{TimePoint, Tfa, ZoneAutomaton};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fig1.json").into());
    let model = Tfa::load(&path)?;
    let za = ZoneAutomaton::build(&model)?;
    let v0 = za.initial()[0];
    for (region, t) in [("[0,0]", "0"), ("(0,1)", "0.5"), ("[1,1]", "1"), ("(1,2)", "1.5"), ("[2,2]", "2")] {
        let set = lambda_estimation(&za, &model, v0, t.parse::<TimePoint>()?);
        let est = Estimate::new(set.clone(), TimePoint::ZERO);
        println!("{region:>6}  {}  ->  {}", za.display_set(&model, &set), est.render(&model));
    }
    Ok(())
}
