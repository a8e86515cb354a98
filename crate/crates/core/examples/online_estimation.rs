//! Online estimation: feed observations one at a time and query the belief
//! as time passes, then check against the batch estimate.
//!
//! `cargo run --example online_estimation [model.json "a@1,a@3" 4]`

use tfa_estimate::estimate::{estimate, BeliefState};
use tfa_estimate::{TimePoint, TimedObservation, Tfa, ZoneAutomaton};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (path, text, end) = match args.as_slice() {
        [p, o, t] => (p.clone(), o.clone(), t.clone()),
        _ => (concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fig1.json").into(), "a@1,a@3".into(), "4".into()),
    };
    let model = Tfa::load(&path)?;
    let za = ZoneAutomaton::build(&model)?;
    let end: TimePoint = end.parse()?;
    let obs = TimedObservation::parse(&model, &text, end)?;

    let mut belief = BeliefState::init(&za, &model)?;
    let mut pending = obs.events().iter().peekable();
    let quarter = TimePoint::from_fraction(1, 4);
    let mut t = TimePoint::ZERO;
    while t <= end {
        while let Some(&&(e, at)) = pending.peek() {
            if at > t {
                break;
            }
            belief = belief.advance(&za, &model, e, at)?;
            println!("observed {} at {at}: support {}", model.event_name(e), za.display_set(&model, belief.support()));
            pending.next();
        }
        let est = belief.query(&za, &model, t)?;
        println!("  t = {:<5} {}", t.to_string(), est.render(&model));
        t = t + quarter;
    }
    let batch = estimate(&za, &model, &obs)?;
    println!("batch estimate at {end}: {}", batch.render(&model));
    println!("{}", batch.to_json(&za, &model));
    Ok(())
}
