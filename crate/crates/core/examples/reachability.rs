//! Exact-duration reachability between discrete states, with a concrete
//! witness run replayed against the model.
//!
//! `cargo run --example reachability [model.json from to duration]`

use tfa_estimate::reach::t_reachable;
use tfa_estimate::{check_run, TimePoint, Tfa, ZoneAutomaton};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (path, queries) = match args.as_slice() {
        [path, from, to, d] => (path.clone(), vec![(from.clone(), to.clone(), d.clone())]),
        _ => (
            concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fig1.json").to_string(),
            [("x0", "x4", "4"), ("x0", "x2", "2"), ("x0", "x3", "2"), ("x2", "x4", "3")]
                .iter()
                .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
                .collect(),
        ),
    };
    let model = Tfa::load(&path)?;
    let za = ZoneAutomaton::build(&model)?;
    for (from, to, d) in queries {
        let x = model.state_id(&from).ok_or("unknown state")?;
        let y = model.state_id(&to).ok_or("unknown state")?;
        let d: TimePoint = d.parse()?;
        match t_reachable(&za, &model, x, y, d) {
            Some(r) => {
                println!("{from} -> {to} in {d}: yes");
                println!("  witness {}", r.witness.display(&model));
                println!("  replay ok: {}", check_run(&model, &r.witness));
                println!("  zone path duration range {}", r.path.duration_range(&za));
            }
            None => println!("{from} -> {to} in {d}: no"),
        }
    }
    Ok(())
}
