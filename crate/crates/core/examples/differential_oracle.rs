//! Compares the estimator with the brute-force grid oracle on random models
//! and prints a summary plus any disagreement.
//!
//! `cargo run --release --example differential_oracle [trials seed]`

use tfa_estimate::differential::{differential_check, DifferentialConfig};
use tfa_estimate::random::RandomModelConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let trials = args.first().map(|s| s.parse()).transpose()?.unwrap_or(50);
    let seed = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(42);
    let config = DifferentialConfig {
        model: RandomModelConfig { state_count: 5, seed, ..Default::default() },
        trials,
        ..Default::default()
    };
    let report = differential_check(&config);
    println!(
        "{} models, {} sampled runs, {} checks: {} mismatches, {} soundness violations",
        report.models,
        report.runs,
        report.entries.len(),
        report.mismatches(),
        report.soundness_violations()
    );
    for e in report.entries.iter().filter(|e| e.verdict != tfa_estimate::differential::Verdict::Agree) {
        println!("{}", serde_json::to_string(e)?);
    }
    Ok(())
}
