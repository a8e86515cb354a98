//! Differential testing of the estimator against the grid oracle on random
//! models.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::automaton::ZoneAutomaton;
use crate::estimate::estimate;
use crate::model::{StateId, Tfa};
use crate::oracle::{brute_consistent_states, GridConfig};
use crate::random::{generate, RandomModelConfig};
use crate::run::{project, RunStep, TimedObservation, TimedRun, TimedState};
use crate::time::TimePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Agree,
    /// The state of the sampled run is missing from the estimate.
    Unsound,
    /// Sound, but the estimator and the oracle disagree.
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReportEntry {
    pub trial: usize,
    pub seed: u64,
    pub model_digest: String,
    pub obs: String,
    pub time: TimePoint,
    pub estimator: Vec<String>,
    pub oracle: Vec<String>,
    pub verdict: Verdict,
    /// Smallest failing model found, as JSON.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub entries: Vec<ReportEntry>,
    pub models: usize,
    pub runs: usize,
}

impl Report {
    pub fn soundness_violations(&self) -> usize {
        self.entries.iter().filter(|e| e.verdict == Verdict::Unsound).count()
    }

    pub fn mismatches(&self) -> usize {
        self.entries.iter().filter(|e| e.verdict != Verdict::Agree).count()
    }

    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        self.entries
            .iter()
            .map(|e| serde_json::to_string(e).expect("report entries serialize") + "\n")
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialConfig {
    /// Template for each trial's model; `state_count` is an upper bound and
    /// `seed` seeds the whole check.
    pub model: RandomModelConfig,
    pub grid: GridConfig,
    pub trials: usize,
    pub runs_per_model: usize,
    pub queries_per_run: usize,
}

impl Default for DifferentialConfig {
    fn default() -> Self {
        DifferentialConfig {
            model: RandomModelConfig::default(),
            grid: GridConfig::default(),
            trials: 200,
            runs_per_model: 6,
            queries_per_run: 3,
        }
    }
}

pub fn model_digest(model: &Tfa) -> String {
    hex::encode(Sha256::digest(model.to_json().as_bytes()))
}

fn names(model: &Tfa, set: &BTreeSet<StateId>) -> Vec<String> {
    let mut v: Vec<String> = set.iter().map(|&x| model.state_name(x).to_string()).collect();
    v.sort();
    v
}

/// Estimator and oracle answers for one observation.
pub fn compare(
    model: &Tfa,
    za: &ZoneAutomaton,
    grid: &GridConfig,
    obs: &TimedObservation,
) -> (BTreeSet<StateId>, BTreeSet<StateId>) {
    let est = estimate(za, model, obs).expect("model satisfies RO").discrete;
    let oracle = brute_consistent_states(model, grid, obs).expect("observation on the grid");
    (est, oracle)
}

/// A random legal run on the grid: random dwells, random enabled transitions.
pub fn sample_run(model: &Tfa, grid: &GridConfig, rng: &mut impl Rng) -> TimedRun {
    let x0 = model.initial()[rng.gen_range(0..model.initial().len())];
    let mut run = TimedRun::empty(TimedState { state: x0, clock: TimePoint::ZERO }, TimePoint::ZERO);
    let top = grid.ticks(grid.horizon).expect("grid horizon");
    while run.len() < grid.max_events && !rng.gen_bool(0.15) {
        let end = run.end();
        let now = grid.ticks(run.end_time()).expect("grid time");
        let mut options = Vec::new();
        for dwell in 0..=(top - now) {
            let clock = end.clock + grid.time(dwell);
            for &id in model.outgoing(end.state) {
                let t = model.transition(id);
                if t.guard.contains(clock) {
                    options.push((dwell, id, clock));
                }
            }
        }
        if options.is_empty() {
            break;
        }
        let (dwell, id, clock) = options[rng.gen_range(0..options.len())];
        let t = model.transition(id);
        let new_clock = match t.reset.interval() {
            None => clock,
            Some(r) => {
                let lo = grid.ticks(TimePoint::from_integer(r.lower_value() as u32)).expect("integer");
                let hi = grid.ticks(TimePoint::from_integer(r.upper_value().expect("bounded") as u32)).expect("integer");
                grid.time(rng.gen_range(lo..=hi))
            }
        };
        run.steps.push(RunStep {
            event: t.event,
            time: grid.time(now + dwell),
            state: TimedState { state: t.target, clock: new_clock },
        });
    }
    run
}

/// Drops transitions one at a time while the estimator and the oracle still
/// disagree on `obs`.
pub fn minimize(model: &Tfa, grid: &GridConfig, obs: &TimedObservation) -> Tfa {
    let disagrees = |m: &Tfa| match ZoneAutomaton::build(m) {
        Ok(za) => {
            let (a, b) = compare(m, &za, grid, obs);
            a != b
        }
        Err(_) => false,
    };
    let mut current = model.to_document();
    let mut i = current.transitions.len();
    while i > 0 {
        i -= 1;
        let mut candidate = current.clone();
        candidate.transitions.remove(i);
        let m = Tfa::from_document(&candidate).expect("subset of a valid model");
        if disagrees(&m) {
            current = candidate;
        }
    }
    Tfa::from_document(&current).expect("subset of a valid model")
}

fn run_trial(trial: usize, seed: u64, config: &DifferentialConfig) -> (Vec<ReportEntry>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model_config = RandomModelConfig {
        state_count: rng.gen_range(1..=config.model.state_count.max(1)),
        seed: rng.gen(),
        require_ro: true,
        ..config.model.clone()
    };
    let model = generate(&model_config);
    let za = ZoneAutomaton::build(&model).expect("generated models build");
    let digest = model_digest(&model);
    let grid = &config.grid;
    let top = grid.ticks(grid.horizon).expect("grid horizon");

    let mut entries = Vec::new();
    for _ in 0..config.runs_per_model {
        let run = sample_run(&model, grid, &mut rng);
        let observed = project(&run.timed_word(), &model);
        let from = grid.ticks(run.end_time()).expect("grid time");
        let mut times: BTreeSet<u32> = [from, top].into();
        while times.len() < config.queries_per_run.min((top - from + 1) as usize) {
            times.insert(rng.gen_range(from..=top));
        }
        for ticks in times {
            let time = grid.time(ticks);
            let obs = TimedObservation::new(&model, observed.clone(), time).expect("projection of a legal run");
            let (est, oracle) = compare(&model, &za, grid, &obs);
            let verdict = if !est.contains(&run.end().state) {
                Verdict::Unsound
            } else if est != oracle {
                Verdict::Mismatch
            } else {
                Verdict::Agree
            };
            let counterexample = (verdict != Verdict::Agree).then(|| minimize(&model, grid, &obs).to_json());
            entries.push(ReportEntry {
                trial,
                seed,
                model_digest: digest.clone(),
                obs: obs.to_text(&model),
                time,
                estimator: names(&model, &est),
                oracle: names(&model, &oracle),
                verdict,
                counterexample,
            });
        }
    }
    (entries, config.runs_per_model)
}

/// Runs `config.trials` independent trials in parallel. Identical configs
/// give identical reports.
pub fn differential_check(config: &DifferentialConfig) -> Report {
    let mut master = ChaCha8Rng::seed_from_u64(config.model.seed);
    let seeds: Vec<u64> = (0..config.trials).map(|_| master.gen()).collect();
    let results: Vec<(Vec<ReportEntry>, usize)> = seeds
        .par_iter()
        .enumerate()
        .map(|(trial, &seed)| run_trial(trial, seed, config))
        .collect();
    let mut report = Report { models: config.trials, ..Report::default() };
    for (entries, runs) in results {
        report.entries.extend(entries);
        report.runs += runs;
    }
    report.entries.sort();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::fig1;
    use crate::run::check_run;

    #[test]
    fn zero_trials_empty_report() {
        let r = differential_check(&DifferentialConfig { trials: 0, ..Default::default() });
        assert!(r.entries.is_empty());
        assert_eq!(r.to_jsonl(), "");
    }

    #[test]
    fn sampled_runs_are_legal() {
        let g = fig1();
        let grid = GridConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let r = sample_run(&g, &grid, &mut rng);
            assert!(check_run(&g, &r), "{}", r.display(&g));
            assert!(r.end_time() <= grid.horizon);
        }
    }

    #[test]
    fn small_check_agrees_and_is_deterministic() {
        let config = DifferentialConfig {
            trials: 12,
            model: RandomModelConfig { seed: 42, ..Default::default() },
            ..Default::default()
        };
        let a = differential_check(&config);
        assert_eq!(a.mismatches(), 0, "{}", a.to_jsonl());
        assert_eq!(a.runs, 12 * 6);
        let b = differential_check(&config);
        assert_eq!(a.to_jsonl(), b.to_jsonl());
        let first: serde_json::Value = serde_json::from_str(a.to_jsonl().lines().next().unwrap()).unwrap();
        for key in ["trial", "seed", "model_digest", "obs", "time", "estimator", "oracle", "verdict"] {
            assert!(first.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn minimize_leaves_agreeing_models_alone() {
        let g = fig1();
        let grid = GridConfig::default();
        let obs = TimedObservation::parse(&g, "a@1", "2".parse().unwrap()).unwrap();
        let m = minimize(&g, &grid, &obs);
        assert_eq!(m.to_json(), g.to_json());
    }

    #[test]
    fn digest_is_stable_hex() {
        let d = model_digest(&fig1());
        assert_eq!(d.len(), 64);
        assert_eq!(d, model_digest(&fig1()));
    }
}
