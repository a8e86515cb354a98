//! Precomputes the offline observer and answers queries by table lookup,
//! comparing each answer with the online estimator.
//!
//! `cargo run --example offline_observer [model.json horizon]`

use tfa_estimate::estimate::BeliefState;
use tfa_estimate::observer::{default_horizon, OfflineObserver};
use tfa_estimate::{TimePoint, Tfa, ZoneAutomaton};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args.first().cloned().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fig1.json").into());
    let model = Tfa::load(&path)?;
    let za = ZoneAutomaton::build(&model)?;
    let horizon = match args.get(1) {
        Some(h) => h.parse()?,
        None => default_horizon(&za, &model).min(8),
    };
    let observer = OfflineObserver::build(&za, &model, horizon)?;
    println!("{} observer states over [0,{horizon}]", observer.state_count());
    for node in 0..observer.state_count() {
        let key = observer.key(node);
        println!("state {node}: {}{}", za.display_set(&model, &key.support), if key.initial { " (initial)" } else { "" });
        for cell in observer.cells(node).iter().take(6) {
            let succ: Vec<String> =
                cell.successors.iter().map(|(e, n)| format!("{}->{n}", model.event_name(*e))).collect();
            println!("  {:<6} {}  {}", cell.region.to_string(), za.display_set(&model, &cell.estimate), succ.join(" "));
        }
    }

    let Some(a) = model.observable_events().next() else { return Ok(()) };
    let c = observer.advance(&za, &model, &observer.cursor(), a, TimePoint::from_integer(1))?;
    let online = BeliefState::init(&za, &model)?.advance(&za, &model, a, TimePoint::from_integer(1))?;
    for t in ["1", "2.5", "3", &format!("{}", horizon + 3)] {
        let t: TimePoint = t.parse()?;
        let table = observer.query(&za, &model, &c, t)?;
        let live = online.query(&za, &model, t)?;
        println!("after {}@1, t = {t}: {}  (online agrees: {})", model.event_name(a), table.render(&model), table == live);
    }
    Ok(())
}
