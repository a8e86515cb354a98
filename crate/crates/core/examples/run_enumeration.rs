//! Enumerates grid runs of a model and projects them onto the observable
//! events, the raw material of the brute-force oracle.
//!
//! `cargo run --example run_enumeration [model.json]`

use std::collections::BTreeMap;

use tfa_estimate::oracle::{enumerate_runs, GridConfig};
use tfa_estimate::run::word_to_text;
use tfa_estimate::{check_run, project, TimePoint, Tfa};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/fig1.json").into());
    let model = Tfa::load(&path)?;
    let grid = GridConfig::new(TimePoint::from_fraction(1, 2), TimePoint::from_integer(2), 3)?;
    let mut by_observation: BTreeMap<String, usize> = BTreeMap::new();
    let mut total = 0;
    for run in enumerate_runs(&model, grid) {
        assert!(check_run(&model, &run));
        if total < 10 {
            println!("{}", run.display(&model));
        }
        total += 1;
        let seen = word_to_text(&model, &project(&run.timed_word(), &model));
        *by_observation.entry(if seen.is_empty() { "(silent)".into() } else { seen }).or_default() += 1;
    }
    println!("... {total} runs on the 1/2 grid up to time 2 with at most 3 events");
    for (obs, n) in by_observation {
        println!("  {obs:<12} {n} runs");
    }
    Ok(())
}
