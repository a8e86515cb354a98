//! Brute-force semantics on a discrete time grid. Nothing here touches zones:
//! it fires transitions on concrete clock values, one grid tick at a time.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::interval::Interval;
use crate::model::{Reset, StateId, Tfa};
use crate::run::{RunStep, TimedObservation, TimedRun, TimedState};
use crate::time::{Rational, TimePoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid step {0} does not divide 1")]
    Step(TimePoint),
    #[error("{0} is not on the grid")]
    OffGrid(TimePoint),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridConfig {
    /// `1 / ticks_per_unit`.
    ticks_per_unit: u32,
    pub horizon: TimePoint,
    pub max_events: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { ticks_per_unit: 2, horizon: TimePoint::from_integer(5), max_events: 6 }
    }
}

impl GridConfig {
    pub fn new(step: TimePoint, horizon: TimePoint, max_events: usize) -> Result<Self, GridError> {
        let inv = step.value().recip();
        if step == TimePoint::ZERO || !inv.is_integer() || *inv.numer() > i64::from(u32::MAX) {
            return Err(GridError::Step(step));
        }
        let grid = GridConfig { ticks_per_unit: *inv.numer() as u32, horizon, max_events };
        grid.ticks(horizon)?;
        Ok(grid)
    }

    pub fn step(&self) -> TimePoint {
        TimePoint::from_fraction(1, i64::from(self.ticks_per_unit))
    }

    pub fn with_horizon(self, horizon: TimePoint) -> Result<Self, GridError> {
        GridConfig::new(self.step(), horizon, self.max_events)
    }

    /// Number of ticks in `t`, if `t` is on the grid.
    pub fn ticks(&self, t: TimePoint) -> Result<u32, GridError> {
        let v = t.value() * Rational::from_integer(i64::from(self.ticks_per_unit));
        if v.is_integer() {
            Ok(v.to_integer() as u32)
        } else {
            Err(GridError::OffGrid(t))
        }
    }

    pub fn time(&self, ticks: u32) -> TimePoint {
        TimePoint::from_fraction(i64::from(ticks), i64::from(self.ticks_per_unit))
    }

    /// Grid points of `[0, horizon]`.
    pub fn points(&self) -> impl Iterator<Item = TimePoint> + '_ {
        let top = self.ticks(self.horizon).expect("horizon is on the grid");
        (0..=top).map(|k| self.time(k))
    }

    /// Grid points inside a bounded interval.
    fn points_in(&self, iv: &Interval) -> Vec<u32> {
        let lo = iv.lower_value() as u32 * self.ticks_per_unit;
        let hi = iv.upper_value().expect("reset intervals are bounded") as u32 * self.ticks_per_unit;
        (lo..=hi).filter(|&k| iv.contains(self.time(k))).collect()
    }
}

/// Clock values a transition may leave behind when fired at clock `ticks`.
fn reset_targets(grid: &GridConfig, reset: &Reset, ticks: u32) -> Vec<u32> {
    match reset {
        Reset::Keep => vec![ticks],
        Reset::To(r) => grid.points_in(r),
    }
}

/// Depth-first enumeration of every legal run whose event times and clock
/// values lie on the grid, within the horizon and event bound.
pub struct RunEnumerator<'a> {
    model: &'a Tfa,
    grid: GridConfig,
    stack: Vec<TimedRun>,
}

pub fn enumerate_runs(model: &Tfa, grid: GridConfig) -> RunEnumerator<'_> {
    let mut stack: Vec<TimedRun> = model
        .initial()
        .iter()
        .map(|&x| TimedRun::empty(TimedState { state: x, clock: TimePoint::ZERO }, TimePoint::ZERO))
        .collect();
    stack.reverse();
    RunEnumerator { model, grid, stack }
}

impl Iterator for RunEnumerator<'_> {
    type Item = TimedRun;

    fn next(&mut self) -> Option<TimedRun> {
        let run = self.stack.pop()?;
        if run.len() < self.grid.max_events {
            let mut children = Vec::new();
            let end = run.end();
            let now = self.grid.ticks(run.end_time()).expect("grid run");
            let clock = self.grid.ticks(end.clock).expect("grid clock");
            let top = self.grid.ticks(self.grid.horizon).expect("grid horizon");
            for dwell in 0..=top.saturating_sub(now) {
                let fire_clock = clock + dwell;
                for &id in self.model.outgoing(end.state) {
                    let t = self.model.transition(id);
                    if !t.guard.contains(self.grid.time(fire_clock)) {
                        continue;
                    }
                    for target_clock in reset_targets(&self.grid, &t.reset, fire_clock) {
                        let mut child = run.clone();
                        child.steps.push(RunStep {
                            event: t.event,
                            time: self.grid.time(now + dwell),
                            state: TimedState { state: t.target, clock: self.grid.time(target_clock) },
                        });
                        children.push(child);
                    }
                }
            }
            children.reverse();
            self.stack.extend(children);
        }
        Some(run)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Config {
    state: StateId,
    clock: u32,
    time: u32,
    consumed: usize,
}

/// States the system can be in at the query time of `obs`, by exhaustive
/// search over grid evolutions that produce exactly `obs`.
pub fn brute_consistent_states(
    model: &Tfa,
    grid: &GridConfig,
    obs: &TimedObservation,
) -> Result<BTreeSet<StateId>, GridError> {
    let times: Vec<u32> = obs.events().iter().map(|&(_, t)| grid.ticks(t)).collect::<Result<_, _>>()?;
    let end = grid.ticks(obs.query_time())?;
    let n = times.len();

    let mut seen = HashSet::new();
    let mut work: Vec<Config> = model
        .initial()
        .iter()
        .map(|&state| Config { state, clock: 0, time: 0, consumed: 0 })
        .collect();
    let mut out = BTreeSet::new();
    while let Some(c) = work.pop() {
        if !seen.insert(c) {
            continue;
        }
        if c.consumed == n && c.time == end {
            out.insert(c.state);
        }
        // time may not pass a pending observation
        let limit = if c.consumed < n { times[c.consumed] } else { end };
        if c.time < limit {
            work.push(Config { clock: c.clock + 1, time: c.time + 1, ..c });
        }
        for &id in model.outgoing(c.state) {
            let t = model.transition(id);
            if !t.guard.contains(grid.time(c.clock)) {
                continue;
            }
            let consumed = if model.is_observable(t.event) {
                if c.consumed < n && obs.events()[c.consumed].0 == t.event && times[c.consumed] == c.time {
                    c.consumed + 1
                } else {
                    continue;
                }
            } else {
                c.consumed
            };
            for clock in reset_targets(grid, &t.reset, c.clock) {
                work.push(Config { state: t.target, clock, time: c.time, consumed });
            }
        }
    }
    Ok(out)
}

/// States occupied exactly `duration` after being in `from` with clock
/// `start_clock`, over grid evolutions. With `unobservable_only` the
/// evolution may not contain observable events.
pub fn brute_reachable(
    model: &Tfa,
    grid: &GridConfig,
    from: StateId,
    start_clock: TimePoint,
    duration: TimePoint,
    unobservable_only: bool,
) -> Result<BTreeSet<StateId>, GridError> {
    let clock0 = grid.ticks(start_clock)?;
    let end = grid.ticks(duration)?;
    let mut seen = HashSet::new();
    let mut work = vec![Config { state: from, clock: clock0, time: 0, consumed: 0 }];
    let mut out = BTreeSet::new();
    while let Some(c) = work.pop() {
        if !seen.insert(c) {
            continue;
        }
        if c.time == end {
            out.insert(c.state);
        } else {
            work.push(Config { clock: c.clock + 1, time: c.time + 1, ..c });
        }
        for &id in model.outgoing(c.state) {
            let t = model.transition(id);
            if (unobservable_only && model.is_observable(t.event)) || !t.guard.contains(grid.time(c.clock)) {
                continue;
            }
            for clock in reset_targets(grid, &t.reset, c.clock) {
                work.push(Config { state: t.target, clock, ..c });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::fig1;
    use crate::run::check_run;

    fn t(s: &str) -> TimePoint {
        s.parse().unwrap()
    }

    fn grid(h: &str, events: usize) -> GridConfig {
        GridConfig::new(t("0.5"), t(h), events).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridConfig::new(t("0.4"), t("2"), 3).is_err());
        assert!(GridConfig::new(t("0.5"), t("2.25"), 3).is_err());
        let g = GridConfig::new(t("0.25"), t("1"), 1).unwrap();
        assert_eq!(g.points().count(), 5);
        assert_eq!(GridConfig::default().step(), t("0.5"));
    }

    #[test]
    fn enumeration_contains_worked_run_and_is_legal() {
        let g = fig1();
        let runs: Vec<TimedRun> = enumerate_runs(&g, grid("2", 3)).collect();
        assert!(runs.iter().all(|r| check_run(&g, r)));
        let texts: Vec<String> = runs.iter().map(|r| r.display(&g).to_string()).collect();
        let worked = "(x0,0.0) --(b,0.5)--> (x2,0.5) --(c,2.0)--> (x3,2.0) --(a,2.0)--> (x2,0.0)";
        assert!(texts.iter().any(|s| s == worked), "{}", texts.len());
        let unique: HashSet<&String> = texts.iter().collect();
        assert_eq!(unique.len(), texts.len());
    }

    #[test]
    fn zero_horizon_keeps_everything_at_time_zero() {
        let g = fig1();
        let runs: Vec<TimedRun> = enumerate_runs(&g, grid("0", 0)).collect();
        assert_eq!(runs.len(), 1);
        assert!(runs[0].is_empty());
        let runs: Vec<TimedRun> = enumerate_runs(&g, grid("0", 3)).collect();
        assert!(runs.iter().all(|r| r.end_time() == TimePoint::ZERO));
        // b is enabled at clock 0
        assert_eq!(runs.len(), 2);
    }

    #[test]
    fn consistent_sets_match_worked_example() {
        let g = fig1();
        let gr = grid("5", 6);
        let names = |s: BTreeSet<StateId>| s.into_iter().map(|x| g.state_name(x).to_string()).collect::<Vec<_>>();
        let obs = TimedObservation::parse(&g, "a@1,a@3", t("4")).unwrap();
        assert_eq!(names(brute_consistent_states(&g, &gr, &obs).unwrap()), ["x2", "x3"]);
        let obs = TimedObservation::silent(TimePoint::ZERO);
        assert_eq!(names(brute_consistent_states(&g, &gr, &obs).unwrap()), ["x0", "x2"]);
        let obs = TimedObservation::parse(&g, "a@0.5", t("1")).unwrap();
        assert!(brute_consistent_states(&g, &gr, &obs).unwrap().is_empty());
        let obs = TimedObservation::parse(&g, "a@0.25", t("1")).unwrap();
        assert!(brute_consistent_states(&g, &gr, &obs).is_err());
    }

    #[test]
    fn brute_reachability() {
        let g = fig1();
        let gr = grid("5", 6);
        let x = |n| g.state_id(n).unwrap();
        let at = |d: &str, only_uo| brute_reachable(&g, &gr, x("x0"), TimePoint::ZERO, t(d), only_uo).unwrap();
        assert!(at("4", false).contains(&x("x4")));
        assert!(at("2", false).contains(&x("x3")));
        assert!(!at("4", true).contains(&x("x4")));
        assert_eq!(at("0", true), [x("x0"), x("x2")].into());
    }
}
