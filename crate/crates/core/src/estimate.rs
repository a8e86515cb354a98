//! λ-estimation, batch state estimation over a timed observation, and the
//! incremental belief state.

use std::collections::BTreeSet;

use serde_json::json;
use thiserror::Error;

use crate::automaton::{ExtendedState, ZoneAutomaton};
use crate::interval::Interval;
use crate::model::{EventId, StateId, Tfa};
use crate::reach::{EdgeFilter, Exploration, Source};
use crate::run::TimedObservation;
use crate::time::TimePoint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EstimateError {
    #[error("observable transitions must reset the clock: {}", .0.join(", "))]
    NotRo(Vec<String>),
    #[error("event `{0}` is not observable")]
    Unobservable(String),
    #[error("time {time} is before the last observation at {anchor}")]
    BeforeAnchor { time: TimePoint, anchor: TimePoint },
}

fn require_ro(model: &Tfa) -> Result<(), EstimateError> {
    if model.satisfies_ro() {
        return Ok(());
    }
    let bad = model
        .transitions()
        .iter()
        .filter(|t| model.is_observable(t.event) && t.reset.is_keep())
        .map(|t| model.transition_label(t))
        .collect();
    Err(EstimateError::NotRo(bad))
}

/// Extended states reachable from `v` (clock anywhere in its zone) in
/// exactly `dt` through unobservable events only.
pub fn lambda_estimation(za: &ZoneAutomaton, model: &Tfa, v: ExtendedState, dt: TimePoint) -> BTreeSet<ExtendedState> {
    lambda_from(za, model, &[Source::whole(za, v)], dt)
}

/// Union of λ-estimations from several starting points, explored together.
pub fn lambda_from(za: &ZoneAutomaton, model: &Tfa, sources: &[Source], dt: TimePoint) -> BTreeSet<ExtendedState> {
    Exploration::run(za, model, sources, dt, EdgeFilter::Unobservable).at(dt)
}

/// Targets of `e`-edges leaving any node of `from`.
pub fn event_step(za: &ZoneAutomaton, from: &BTreeSet<ExtendedState>, e: EventId) -> BTreeSet<ExtendedState> {
    from.iter().flat_map(|&v| za.event_successors(v, e)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Estimate {
    pub extended: BTreeSet<ExtendedState>,
    pub discrete: BTreeSet<StateId>,
    /// Time of the last observation the estimate builds on.
    pub anchor: TimePoint,
}

impl Estimate {
    pub fn new(extended: BTreeSet<ExtendedState>, anchor: TimePoint) -> Self {
        let discrete = extended.iter().map(|v| v.state).collect();
        Estimate { extended, discrete, anchor }
    }

    pub fn is_empty(&self) -> bool {
        self.discrete.is_empty()
    }

    /// Sorted state names.
    pub fn state_names<'a>(&self, model: &'a Tfa) -> Vec<&'a str> {
        let mut names: Vec<&str> = self.discrete.iter().map(|&x| model.state_name(x)).collect();
        names.sort_unstable();
        names
    }

    /// State names separated by spaces, `(none)` when empty.
    pub fn render(&self, model: &Tfa) -> String {
        if self.is_empty() {
            "(none)".into()
        } else {
            self.state_names(model).join(" ")
        }
    }

    pub fn to_json(&self, za: &ZoneAutomaton, model: &Tfa) -> serde_json::Value {
        let extended: Vec<[String; 2]> = za
            .sorted_by_name(model, self.extended.iter().copied())
            .into_iter()
            .map(|v| [model.state_name(v.state).to_string(), za.zone(v).to_string()])
            .collect();
        json!({
            "discrete": self.state_names(model),
            "extended": extended,
            "anchor": self.anchor.to_string(),
        })
    }
}

/// The estimate for `obs`, recomputed from scratch: one λ-estimation per
/// supporting extended state, then the event step, for every observation.
pub fn estimate(za: &ZoneAutomaton, model: &Tfa, obs: &TimedObservation) -> Result<Estimate, EstimateError> {
    require_ro(model)?;
    let mut support: Vec<Source> = za
        .initial()
        .iter()
        .map(|&v| Source { node: v, clock: Interval::point(0) })
        .collect();
    let mut anchor = TimePoint::ZERO;
    for &(e, t) in obs.events() {
        let reached = union_of_lambdas(za, model, &support, t - anchor);
        support = event_step(za, &reached, e).into_iter().map(|v| Source::whole(za, v)).collect();
        anchor = t;
    }
    let last = union_of_lambdas(za, model, &support, obs.query_time() - anchor);
    Ok(Estimate::new(last, anchor))
}

fn union_of_lambdas(za: &ZoneAutomaton, model: &Tfa, support: &[Source], dt: TimePoint) -> BTreeSet<ExtendedState> {
    support
        .iter()
        .flat_map(|src| lambda_from(za, model, std::slice::from_ref(src), dt))
        .collect()
}

/// What the online estimator remembers: the extended states possible right
/// after the last observation, and its time.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BeliefState {
    support: BTreeSet<ExtendedState>,
    anchor: TimePoint,
    /// No observation yet, so the clock is still exactly 0.
    initial: bool,
}

impl BeliefState {
    pub fn init(za: &ZoneAutomaton, model: &Tfa) -> Result<Self, EstimateError> {
        require_ro(model)?;
        Ok(BeliefState { support: za.initial().iter().copied().collect(), anchor: TimePoint::ZERO, initial: true })
    }

    /// A belief anchored at `anchor` right after an observable event.
    pub fn from_support(support: BTreeSet<ExtendedState>, anchor: TimePoint) -> Self {
        BeliefState { support, anchor, initial: false }
    }

    pub fn support(&self) -> &BTreeSet<ExtendedState> {
        &self.support
    }

    pub fn anchor(&self) -> TimePoint {
        self.anchor
    }

    pub fn is_initial(&self) -> bool {
        self.initial
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn sources(&self, za: &ZoneAutomaton) -> Vec<Source> {
        self.support
            .iter()
            .map(|&v| {
                if self.initial {
                    Source { node: v, clock: Interval::point(0) }
                } else {
                    Source::whole(za, v)
                }
            })
            .collect()
    }

    /// Everything reachable without observable events up to `dt` after the
    /// anchor.
    pub fn explore(&self, za: &ZoneAutomaton, model: &Tfa, dt: TimePoint) -> Exploration {
        Exploration::run(za, model, &self.sources(za), dt, EdgeFilter::Unobservable)
    }

    fn elapsed(&self, t: TimePoint) -> Result<TimePoint, EstimateError> {
        t.since(self.anchor).ok_or(EstimateError::BeforeAnchor { time: t, anchor: self.anchor })
    }

    /// Consumes the observation of `e` at time `t`.
    pub fn advance(&self, za: &ZoneAutomaton, model: &Tfa, e: EventId, t: TimePoint) -> Result<Self, EstimateError> {
        if !model.is_observable(e) {
            return Err(EstimateError::Unobservable(model.event_name(e).to_string()));
        }
        let dt = self.elapsed(t)?;
        let reached = self.explore(za, model, dt).at(dt);
        Ok(BeliefState::from_support(event_step(za, &reached, e), t))
    }

    pub fn query(&self, za: &ZoneAutomaton, model: &Tfa, t: TimePoint) -> Result<Estimate, EstimateError> {
        let dt = self.elapsed(t)?;
        Ok(Estimate::new(self.explore(za, model, dt).at(dt), self.anchor))
    }

    /// Advances through all events of `obs`, then queries at its query time.
    pub fn run(za: &ZoneAutomaton, model: &Tfa, obs: &TimedObservation) -> Result<(Self, Estimate), EstimateError> {
        let mut b = BeliefState::init(za, model)?;
        for &(e, t) in obs.events() {
            b = b.advance(za, model, e, t)?;
        }
        let est = b.query(za, model, obs.query_time())?;
        Ok((b, est))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::fig1;

    fn t(s: &str) -> TimePoint {
        s.parse().unwrap()
    }

    fn setup() -> (Tfa, ZoneAutomaton) {
        let g = fig1();
        let za = ZoneAutomaton::build(&g).unwrap();
        (g, za)
    }

    #[test]
    fn lambda_rows_from_initial() {
        let (g, za) = setup();
        let v0 = za.initial()[0];
        let at = |s: &str| za.display_set(&g, &lambda_estimation(&za, &g, v0, t(s)));
        assert_eq!(at("0.5"), "{(x0,(0,1)), (x2,(0,1))}");
        assert_eq!(at("1"), "{(x0,[1,1]), (x1,[1,1]), (x2,[1,1]), (x3,[1,1])}");
        assert_eq!(at("2"), "{(x0,(1,3]), (x1,[1,1]), (x1,(1,3]), (x2,[2,2]), (x3,[2,2])}");
    }

    #[test]
    fn batch_estimates() {
        let (g, za) = setup();
        let run = |text: &str, q: &str| {
            let obs = TimedObservation::parse(&g, text, t(q)).unwrap();
            estimate(&za, &g, &obs).unwrap().render(&g)
        };
        assert_eq!(run("", "0"), "x0 x2");
        assert_eq!(run("a@1", "2"), "x2 x3 x4");
        assert_eq!(run("a@1,a@3", "4"), "x2 x3");
        assert_eq!(run("a@1,a@3", "3.5"), "x2");
        assert_eq!(run("a@0.5", "1"), "(none)");
    }

    #[test]
    fn belief_steps() {
        let (g, za) = setup();
        let a = g.event_id("a").unwrap();
        let b0 = BeliefState::init(&za, &g).unwrap();
        assert_eq!(za.display_set(&g, b0.support()), "{(x0,[0,0])}");
        assert_eq!(b0.anchor(), TimePoint::ZERO);
        let b1 = b0.advance(&za, &g, a, t("1")).unwrap();
        assert_eq!(za.display_set(&g, b1.support()), "{(x2,[0,0]), (x4,[0,1])}");
        assert_eq!(b1.anchor(), t("1"));
        assert_eq!(b1.query(&za, &g, t("3")).unwrap().render(&g), "x2 x3 x4");
        let b2 = b1.advance(&za, &g, a, t("3")).unwrap();
        assert_eq!(za.display_set(&g, b2.support()), "{(x2,[0,0])}");
        assert!(matches!(b2.query(&za, &g, t("2")), Err(EstimateError::BeforeAnchor { .. })));
        let b = g.event_id("b").unwrap();
        assert!(matches!(b2.advance(&za, &g, b, t("4")), Err(EstimateError::Unobservable(_))));
    }

    #[test]
    fn json_shape() {
        let (g, za) = setup();
        let obs = TimedObservation::parse(&g, "a@1", t("1")).unwrap();
        let est = estimate(&za, &g, &obs).unwrap();
        assert_eq!(
            est.to_json(&za, &g).to_string(),
            r#"{"anchor":"1.0","discrete":["x2","x3","x4"],"extended":[["x2","[0,0]"],["x3","[0,0]"],["x4","[0,1]"]]}"#
        );
    }

    #[test]
    fn non_ro_models_are_refused() {
        let g = Tfa::from_json(
            r#"{"states":["p","q"],"alphabet":["a"],"observable":["a"],"initial":["p"],
                "transitions":[{"from":"p","event":"a","to":"q","guard":"[0,1]","reset":"id"}]}"#,
        )
        .unwrap();
        let za = ZoneAutomaton::build(&g).unwrap();
        let obs = TimedObservation::silent(TimePoint::ZERO);
        assert_eq!(estimate(&za, &g, &obs), Err(EstimateError::NotRo(vec!["(p,a,q)".into()])));
        assert!(BeliefState::init(&za, &g).is_err());
    }
}
