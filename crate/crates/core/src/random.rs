//! Seeded random models for differential testing.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::interval::Interval;
use crate::model::{ModelDocument, Reset, Tfa, TransitionDocument};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomModelConfig {
    pub state_count: usize,
    pub event_count: usize,
    pub max_constant: u64,
    pub observable_fraction: f64,
    /// Chance that a given `(source, event, target)` triple is a transition.
    pub transition_density: f64,
    pub reset_id_probability: f64,
    /// Observable transitions always reset the clock.
    pub require_ro: bool,
    pub seed: u64,
}

impl Default for RandomModelConfig {
    fn default() -> Self {
        RandomModelConfig {
            state_count: 4,
            event_count: 3,
            max_constant: 3,
            observable_fraction: 0.4,
            transition_density: 0.2,
            reset_id_probability: 0.3,
            require_ro: true,
            seed: 0,
        }
    }
}

fn random_interval(rng: &mut ChaCha8Rng, max: u64) -> Interval {
    let a = rng.gen_range(0..=max);
    let b = rng.gen_range(0..=max);
    Interval::closed(a.min(b), a.max(b))
}

/// A model with states `s0..`, events `e0..`, initial state `s0`. At least
/// one event is observable and, with two or more events, at least one is not.
pub fn generate(config: &RandomModelConfig) -> Tfa {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let states: Vec<String> = (0..config.state_count.max(1)).map(|i| format!("s{i}")).collect();
    let events: Vec<String> = (0..config.event_count.max(1)).map(|i| format!("e{i}")).collect();

    let mut observable: Vec<bool> = events.iter().map(|_| rng.gen_bool(config.observable_fraction)).collect();
    if !observable.iter().any(|&o| o) {
        observable[0] = true;
    }
    if events.len() > 1 && observable.iter().all(|&o| o) {
        let last = observable.len() - 1;
        observable[last] = false;
    }

    let mut transitions = Vec::new();
    for from in &states {
        for (ei, event) in events.iter().enumerate() {
            for to in &states {
                if !rng.gen_bool(config.transition_density) {
                    continue;
                }
                let guard = random_interval(&mut rng, config.max_constant);
                let keep = !(config.require_ro && observable[ei]) && rng.gen_bool(config.reset_id_probability);
                let reset = if keep { Reset::Keep } else { Reset::To(random_interval(&mut rng, config.max_constant)) };
                transitions.push(TransitionDocument {
                    from: from.clone(),
                    event: event.clone(),
                    to: to.clone(),
                    guard,
                    reset,
                });
            }
        }
    }

    let doc = ModelDocument {
        observable: events.iter().zip(&observable).filter(|(_, &o)| o).map(|(e, _)| e.clone()).collect(),
        initial: vec![states[0].clone()],
        states,
        alphabet: events,
        transitions,
    };
    Tfa::from_document(&doc).expect("generated models are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::ZoneAutomaton;

    #[test]
    fn same_seed_same_model() {
        let c = RandomModelConfig { seed: 7, ..Default::default() };
        assert_eq!(generate(&c).to_json(), generate(&c).to_json());
        let d = RandomModelConfig { seed: 8, ..Default::default() };
        assert_ne!(generate(&c).to_json(), generate(&d).to_json());
    }

    #[test]
    fn generated_models_validate_and_build() {
        for seed in 0..200 {
            let c = RandomModelConfig { seed, state_count: 5, transition_density: 0.3, ..Default::default() };
            let g = generate(&c);
            assert!(g.validate(true).is_empty(), "seed {seed}");
            assert!(g.observable_events().count() >= 1);
            assert!(g.max_constant() <= 3);
            ZoneAutomaton::build(&g).unwrap();
        }
    }

    #[test]
    fn ro_can_be_relaxed() {
        let found = (0..100).any(|seed| {
            let c = RandomModelConfig {
                seed,
                require_ro: false,
                reset_id_probability: 0.9,
                observable_fraction: 0.9,
                ..Default::default()
            };
            !generate(&c).satisfies_ro()
        });
        assert!(found);
    }
}
