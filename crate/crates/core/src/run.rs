//! Timed runs, timed words, observations and the projections between them.

use std::fmt;

use thiserror::Error;

use crate::model::{EventId, Reset, StateId, Tfa};
use crate::time::{TimeParseError, TimePoint};

/// A discrete state together with the clock value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimedState {
    pub state: StateId,
    pub clock: TimePoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RunStep {
    pub event: EventId,
    pub time: TimePoint,
    pub state: TimedState,
}

/// `(x0,θ0) --(e1,t1)--> (x1,θ1) ... --(ek,tk)--> (xk,θk)` starting at `start_time`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimedRun {
    pub start_time: TimePoint,
    pub start: TimedState,
    pub steps: Vec<RunStep>,
}

/// A word over `E × time`.
pub type TimedWord = Vec<(EventId, TimePoint)>;

impl TimedRun {
    pub fn empty(start: TimedState, start_time: TimePoint) -> Self {
        TimedRun { start_time, start, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self) -> TimedState {
        self.steps.last().map_or(self.start, |s| s.state)
    }

    pub fn end_time(&self) -> TimePoint {
        self.steps.last().map_or(self.start_time, |s| s.time)
    }

    pub fn duration(&self) -> TimePoint {
        self.end_time() - self.start_time
    }

    pub fn timed_word(&self) -> TimedWord {
        self.steps.iter().map(|s| (s.event, s.time)).collect()
    }

    pub fn logical_word(&self) -> Vec<EventId> {
        self.steps.iter().map(|s| s.event).collect()
    }

    pub fn display<'a>(&'a self, model: &'a Tfa) -> impl fmt::Display + 'a {
        RunDisplay { run: self, model }
    }
}

struct RunDisplay<'a> {
    run: &'a TimedRun,
    model: &'a Tfa,
}

impl fmt::Display for RunDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.model;
        let s = self.run.start;
        write!(f, "({},{})", m.state_name(s.state), s.clock)?;
        for step in &self.run.steps {
            write!(
                f,
                " --({},{})--> ({},{})",
                m.event_name(step.event),
                step.time,
                m.state_name(step.state.state),
                step.state.clock
            )?;
        }
        Ok(())
    }
}

/// True iff every step of `run` is allowed by some transition of `model`.
pub fn check_run(model: &Tfa, run: &TimedRun) -> bool {
    let mut prev = run.start;
    let mut prev_time = run.start_time;
    for step in &run.steps {
        let Some(elapsed) = step.time.since(prev_time) else {
            return false;
        };
        let clock_at_fire = prev.clock + elapsed;
        let legal = model.outgoing(prev.state).iter().any(|id| {
            let t = model.transition(*id);
            t.event == step.event
                && t.target == step.state.state
                && t.guard.contains(clock_at_fire)
                && match t.reset {
                    Reset::To(r) => r.contains(step.state.clock),
                    Reset::Keep => step.state.clock == clock_at_fire,
                }
        });
        if !legal {
            return false;
        }
        prev = step.state;
        prev_time = step.time;
    }
    true
}

/// Erases unobservable pairs from a timed word.
pub fn project(word: &[(EventId, TimePoint)], model: &Tfa) -> TimedWord {
    word.iter().copied().filter(|(e, _)| model.is_observable(*e)).collect()
}

/// Erases unobservable events from a logical word.
pub fn project_logical(word: &[EventId], model: &Tfa) -> Vec<EventId> {
    word.iter().copied().filter(|e| model.is_observable(*e)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObservationError {
    #[error("malformed observation pair `{0}` (expected event@time)")]
    Syntax(String),
    #[error("bad timestamp in `{pair}`: {source}")]
    Time { pair: String, source: TimeParseError },
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("event `{0}` is not observable")]
    Unobservable(String),
    #[error("timestamps must be non-decreasing ({later} follows {earlier})")]
    OutOfOrder { earlier: TimePoint, later: TimePoint },
    #[error("observation at {event_time} is after the query time {query_time}")]
    AfterQuery { event_time: TimePoint, query_time: TimePoint },
}

/// Observed events with timestamps, plus the current time.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimedObservation {
    events: TimedWord,
    query_time: TimePoint,
}

impl TimedObservation {
    pub fn new(model: &Tfa, events: TimedWord, query_time: TimePoint) -> Result<Self, ObservationError> {
        let mut last = TimePoint::ZERO;
        for &(e, t) in &events {
            if !model.is_observable(e) {
                return Err(ObservationError::Unobservable(model.event_name(e).to_string()));
            }
            if t < last {
                return Err(ObservationError::OutOfOrder { earlier: last, later: t });
            }
            last = t;
        }
        if last > query_time {
            return Err(ObservationError::AfterQuery { event_time: last, query_time });
        }
        Ok(TimedObservation { events, query_time })
    }

    /// The empty observation at `query_time`.
    pub fn silent(query_time: TimePoint) -> Self {
        TimedObservation { events: Vec::new(), query_time }
    }

    /// Parses `e@t` pairs separated by commas; the empty string is the empty
    /// observation.
    pub fn parse(model: &Tfa, text: &str, query_time: TimePoint) -> Result<Self, ObservationError> {
        let events = parse_timed_word(model, text)?;
        TimedObservation::new(model, events, query_time)
    }

    pub fn events(&self) -> &[(EventId, TimePoint)] {
        &self.events
    }

    pub fn query_time(&self) -> TimePoint {
        self.query_time
    }

    pub fn last_event_time(&self) -> TimePoint {
        self.events.last().map_or(TimePoint::ZERO, |(_, t)| *t)
    }

    /// Same events, different query time.
    pub fn at(&self, query_time: TimePoint) -> Result<Self, ObservationError> {
        if self.last_event_time() > query_time {
            return Err(ObservationError::AfterQuery { event_time: self.last_event_time(), query_time });
        }
        Ok(TimedObservation { events: self.events.clone(), query_time })
    }

    pub fn to_text(&self, model: &Tfa) -> String {
        word_to_text(model, &self.events)
    }
}

/// Parses `e@t,e@t,...` without checking observability or order.
pub fn parse_timed_word(model: &Tfa, text: &str) -> Result<TimedWord, ObservationError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|pair| {
            let pair = pair.trim();
            let (name, time) = pair.split_once('@').ok_or_else(|| ObservationError::Syntax(pair.to_string()))?;
            let name = name.trim();
            if name.is_empty() {
                return Err(ObservationError::Syntax(pair.to_string()));
            }
            let e = model.event_id(name).ok_or_else(|| ObservationError::UnknownEvent(name.to_string()))?;
            let t = time
                .parse()
                .map_err(|source| ObservationError::Time { pair: pair.to_string(), source })?;
            Ok((e, t))
        })
        .collect()
}

pub fn word_to_text(model: &Tfa, word: &[(EventId, TimePoint)]) -> String {
    word.iter()
        .map(|(e, t)| format!("{}@{}", model.event_name(*e), t))
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::fig1;

    fn tp(s: &str) -> TimePoint {
        s.parse().unwrap()
    }

    fn ts(model: &Tfa, x: &str, clock: &str) -> TimedState {
        TimedState { state: model.state_id(x).unwrap(), clock: tp(clock) }
    }

    fn step(model: &Tfa, e: &str, t: &str, x: &str, clock: &str) -> RunStep {
        RunStep { event: model.event_id(e).unwrap(), time: tp(t), state: ts(model, x, clock) }
    }

    fn example_run(g: &Tfa) -> TimedRun {
        TimedRun {
            start_time: TimePoint::ZERO,
            start: ts(g, "x0", "0"),
            steps: vec![
                step(g, "b", "0.5", "x2", "0.5"),
                step(g, "c", "2", "x3", "2"),
                step(g, "a", "2", "x2", "0"),
            ],
        }
    }

    #[test]
    fn worked_run_is_legal() {
        let g = fig1();
        let run = example_run(&g);
        assert!(check_run(&g, &run));
        assert_eq!(run.end(), ts(&g, "x2", "0"));
        assert_eq!(run.duration(), tp("2"));
        assert_eq!(
            run.display(&g).to_string(),
            "(x0,0.0) --(b,0.5)--> (x2,0.5) --(c,2.0)--> (x3,2.0) --(a,2.0)--> (x2,0.0)"
        );
    }

    #[test]
    fn wrong_reset_value_is_rejected() {
        let g = fig1();
        let mut run = example_run(&g);
        run.steps[2].state.clock = tp("0.5");
        assert!(!check_run(&g, &run));
    }

    #[test]
    fn other_illegal_runs() {
        let g = fig1();
        // id transition must carry the clock over
        let mut run = example_run(&g);
        run.steps[0].state.clock = tp("0");
        assert!(!check_run(&g, &run));
        // time going backwards
        let mut run = example_run(&g);
        run.steps[1].time = tp("0.25");
        assert!(!check_run(&g, &run));
        // guard of (x0,b,x2) is [0,1]
        let mut run = example_run(&g);
        run.steps[0] = step(&g, "b", "1.5", "x2", "1.5");
        assert!(!check_run(&g, &run));
        // no such transition
        let run = TimedRun { steps: vec![step(&g, "a", "1", "x4", "0")], ..example_run(&g) };
        assert!(!check_run(&g, &run));
    }

    #[test]
    fn empty_run_is_legal() {
        let g = fig1();
        let run = TimedRun::empty(ts(&g, "x0", "0"), TimePoint::ZERO);
        assert!(check_run(&g, &run));
        assert!(run.is_empty());
        assert_eq!(run.timed_word(), vec![]);
    }

    #[test]
    fn projections() {
        let g = fig1();
        let run = example_run(&g);
        let a = g.event_id("a").unwrap();
        let b = g.event_id("b").unwrap();
        assert_eq!(project(&run.timed_word(), &g), vec![(a, tp("2"))]);
        assert_eq!(project(&[], &g), vec![]);
        let word = vec![(a, tp("1")), (a, tp("3"))];
        assert_eq!(project(&word, &g), word);

        assert_eq!(project_logical(&run.logical_word(), &g), vec![a]);
        assert_eq!(project_logical(&[], &g), vec![]);
        assert_eq!(project_logical(&[b, b], &g), vec![]);
        // projecting then dropping times equals dropping times then projecting
        let timed: Vec<EventId> = project(&run.timed_word(), &g).iter().map(|(e, _)| *e).collect();
        assert_eq!(timed, project_logical(&run.logical_word(), &g));
    }

    #[test]
    fn observation_parsing() {
        let g = fig1();
        let obs = TimedObservation::parse(&g, "a@1, a@3", tp("4")).unwrap();
        assert_eq!(obs.events().len(), 2);
        assert_eq!(obs.to_text(&g), "a@1.0,a@3.0");
        assert_eq!(obs.last_event_time(), tp("3"));
        let empty = TimedObservation::parse(&g, "", tp("0")).unwrap();
        assert!(empty.events().is_empty());
        assert_eq!(empty, TimedObservation::silent(TimePoint::ZERO));
    }

    #[test]
    fn observation_errors() {
        let g = fig1();
        let parse = |s: &str, t: &str| TimedObservation::parse(&g, s, tp(t));
        assert!(matches!(parse("a1", "4"), Err(ObservationError::Syntax(_))));
        assert!(matches!(parse("@1", "4"), Err(ObservationError::Syntax(_))));
        assert!(matches!(parse("a@x", "4"), Err(ObservationError::Time { .. })));
        assert!(matches!(parse("z@1", "4"), Err(ObservationError::UnknownEvent(_))));
        assert!(matches!(parse("b@1", "4"), Err(ObservationError::Unobservable(_))));
        assert!(matches!(parse("a@3,a@1", "4"), Err(ObservationError::OutOfOrder { .. })));
        assert!(matches!(parse("a@5", "4"), Err(ObservationError::AfterQuery { .. })));
        assert!(parse("a@1,a@1", "1").is_ok());
    }
}
