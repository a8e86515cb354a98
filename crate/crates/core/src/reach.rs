//! Time-bounded exploration of the zone automaton, τ-runs, and
//! T-reachability with witness runs.
//!
//! Each explored node of the zone automaton carries the exact set of
//! `(clock, elapsed)` pairs with which it can be occupied, as a DBM. This is
//! what makes membership at one precise elapsed time decidable without the
//! over-approximation that interval sums of whole τ-runs bring in.

use std::collections::{BTreeMap, BTreeSet};

use crate::automaton::{ExtendedState, Label, ZoneAutomaton};
use crate::dbm::Dbm;
use crate::interval::Interval;
use crate::model::{Reset, StateId, Tfa, TransitionId};
use crate::run::{RunStep, TimedRun, TimedState};
use crate::time::{Rational, TimePoint};

const CLOCK: usize = 1;
const ELAPSED: usize = 2;

/// Every `(x, z')` reachable from `v` by letting time pass, with the
/// distance range `D(z, z')`.
pub fn tau_reach(za: &ZoneAutomaton, v: ExtendedState) -> Vec<(ExtendedState, Interval)> {
    let from = za.zone(v);
    (v.zone..za.zones(v.state).len())
        .map(|zone| {
            let w = ExtendedState { state: v.state, zone };
            (w, from.distance(&za.zone(w)))
        })
        .collect()
}

/// Where an exploration starts: a node and the clock values allowed there at
/// elapsed time 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Source {
    pub node: ExtendedState,
    pub clock: Interval,
}

impl Source {
    /// Clock anywhere in the node's zone.
    pub fn whole(za: &ZoneAutomaton, node: ExtendedState) -> Source {
        Source { node, clock: za.zone(node) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Tau,
    Edge(usize),
}

#[derive(Debug, Clone)]
struct Entry {
    node: ExtendedState,
    dbm: Dbm,
    parent: Option<(usize, Step)>,
    source: usize,
}

/// Which event edges an exploration may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeFilter {
    Unobservable,
    All,
}

/// The reachable `(node, clock, elapsed)` space from a set of sources up to a
/// time horizon.
#[derive(Debug, Clone)]
pub struct Exploration {
    sources: Vec<Source>,
    entries: Vec<Entry>,
    active: BTreeMap<ExtendedState, Vec<usize>>,
    horizon: Rational,
}

impl Exploration {
    pub fn run(za: &ZoneAutomaton, model: &Tfa, sources: &[Source], horizon: TimePoint, filter: EdgeFilter) -> Self {
        let mut ex = Exploration {
            sources: sources.to_vec(),
            entries: Vec::new(),
            active: BTreeMap::new(),
            horizon: horizon.value(),
        };
        let mut work = Vec::new();
        for (i, src) in sources.iter().enumerate() {
            let mut d = Dbm::universe(2);
            d.constrain_var(CLOCK, &src.clock);
            d.constrain_eq(ELAPSED, 0, Rational::from_integer(0));
            if let Some(id) = ex.settle(za, src.node, d, None, i) {
                work.push(id);
            }
        }

        while let Some(id) = work.pop() {
            let (node, source) = (ex.entries[id].node, ex.entries[id].source);
            if !ex.active[&node].contains(&id) {
                continue;
            }
            if let Some(next) = za.tau_successor(node) {
                let mut d = ex.entries[id].dbm.clone();
                d.up();
                if let Some(n) = ex.settle(za, next, d, Some((id, Step::Tau)), source) {
                    work.push(n);
                }
            }
            let edges: Vec<usize> = za
                .out_edge_indices(node)
                .filter(|&e| {
                    let edge = &za.edges()[e];
                    match edge.label {
                        Label::Tau => false,
                        Label::Event(ev) => filter == EdgeFilter::All || !model.is_observable(ev),
                    }
                })
                .collect();
            for e in edges {
                let edge = &za.edges()[e];
                let t = model.transition(edge.transition.expect("event edges carry a transition"));
                let mut d = ex.entries[id].dbm.clone();
                if let Reset::To(_) = t.reset {
                    d.free(CLOCK);
                }
                if let Some(n) = ex.settle(za, edge.to, d, Some((id, Step::Edge(e))), source) {
                    work.push(n);
                }
            }
        }
        ex
    }

    /// Restricts `d` to the zone of `node`, lets time pass inside it and records the result unless an
    /// existing entry already covers it.
    fn settle(
        &mut self,
        za: &ZoneAutomaton,
        node: ExtendedState,
        mut d: Dbm,
        parent: Option<(usize, Step)>,
        source: usize,
    ) -> Option<usize> {
        let zone = za.zone(node);
        d.constrain_var(CLOCK, &zone);
        d.up();
        d.constrain_var(CLOCK, &zone);
        d.constrain(ELAPSED, 0, crate::dbm::Limit::le(self.horizon));
        if d.is_empty() {
            return None;
        }
        let slot = self.active.entry(node).or_default();
        if slot.iter().any(|&i| self.entries[i].dbm.includes(&d)) {
            return None;
        }
        let entries = &self.entries;
        slot.retain(|&i| !d.includes(&entries[i].dbm));
        let id = self.entries.len();
        slot.push(id);
        self.entries.push(Entry { node, dbm: d, parent, source });
        Some(id)
    }

    pub fn horizon(&self) -> TimePoint {
        TimePoint::new(self.horizon).expect("horizon is non-negative")
    }

    fn entry_at(&self, node: ExtendedState, dt: Rational) -> Option<usize> {
        self.active.get(&node)?.iter().copied().find(|&i| {
            let mut d = self.entries[i].dbm.clone();
            d.constrain_eq(ELAPSED, 0, dt);
            !d.is_empty()
        })
    }

    /// Nodes occupied at exactly `dt` after the sources; `dt` may not exceed
    /// the horizon.
    pub fn at(&self, dt: TimePoint) -> BTreeSet<ExtendedState> {
        assert!(dt.value() <= self.horizon, "query beyond exploration horizon");
        self.active
            .keys()
            .copied()
            .filter(|&node| self.entry_at(node, dt.value()).is_some())
            .collect()
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    /// The zone automaton path that produced a node occupied at `dt`.
    pub fn path_to(&self, za: &ZoneAutomaton, node: ExtendedState, dt: TimePoint) -> Option<(Source, ZaRun)> {
        let mut id = self.entry_at(node, dt.value())?;
        let mut steps = Vec::new();
        while let Some((parent, step)) = self.entries[id].parent {
            let to = self.entries[id].node;
            steps.push(match step {
                Step::Tau => ZaStep { label: Label::Tau, to, transition: None },
                Step::Edge(e) => {
                    let edge = &za.edges()[e];
                    ZaStep { label: edge.label, to, transition: edge.transition }
                }
            });
            id = parent;
        }
        steps.reverse();
        let source = self.sources[self.entries[id].source];
        Some((source, ZaRun { start: source.node, steps }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZaStep {
    pub label: Label,
    pub to: ExtendedState,
    pub transition: Option<TransitionId>,
}

/// A run of the zone automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZaRun {
    pub start: ExtendedState,
    pub steps: Vec<ZaStep>,
}

impl ZaRun {
    pub fn end(&self) -> ExtendedState {
        self.steps.last().map_or(self.start, |s| s.to)
    }

    /// `(first, last)` node of every τ-segment, in order. There is one more
    /// segment than there are event steps.
    pub fn segments(&self) -> Vec<(ExtendedState, ExtendedState)> {
        let mut out = Vec::new();
        let mut first = self.start;
        let mut last = self.start;
        for s in &self.steps {
            match s.label {
                Label::Tau => last = s.to,
                Label::Event(_) => {
                    out.push((first, last));
                    first = s.to;
                    last = s.to;
                }
            }
        }
        out.push((first, last));
        out
    }

    /// Sum of the distance ranges of all τ-segments.
    pub fn duration_range(&self, za: &ZoneAutomaton) -> Interval {
        self.segments()
            .into_iter()
            .map(|(a, b)| za.zone(a).distance(&za.zone(b)))
            .reduce(|acc, d| acc.add(&d))
            .expect("at least one segment")
    }

    /// Chooses concrete event times and clock values so that the run takes
    /// exactly `duration`, starting at `start_time` with a clock in
    /// `start_clock`.
    pub fn concretize(
        &self,
        za: &ZoneAutomaton,
        model: &Tfa,
        start_clock: &Interval,
        start_time: TimePoint,
        duration: TimePoint,
    ) -> Option<TimedRun> {
        let segments = self.segments();
        let events: Vec<&ZaStep> = self.steps.iter().filter(|s| s.label != Label::Tau).collect();
        let k = events.len();
        // variables: 1..=k event times, then k+1 offsets (time minus clock)
        let time_var = |j: usize| j;
        let offset_var = |j: usize| k + 1 + j;
        let total = duration.value();
        let zero = Rational::from_integer(0);

        let mut d = Dbm::unrestricted(2 * k + 1);
        d.constrain_difference(0, offset_var(0), start_clock, zero);
        for j in 1..=k {
            // t_j >= t_{j-1}, t_k <= total
            d.constrain(time_var(j - 1), time_var(j), crate::dbm::Limit::le(zero));
        }
        if k > 0 {
            d.constrain(time_var(k), 0, crate::dbm::Limit::le(total));
        } else if total < zero {
            return None;
        }
        for (j, (first, last)) in segments.iter().enumerate() {
            d.constrain_difference(time_var(j), offset_var(j), &za.zone(*first), zero);
            if j < k {
                d.constrain_difference(time_var(j + 1), offset_var(j), &za.zone(*last), zero);
                let t = model.transition(events[j].transition.expect("event step has a transition"));
                if t.reset.is_keep() {
                    d.constrain_eq(offset_var(j + 1), offset_var(j), zero);
                }
            } else {
                d.constrain_difference(0, offset_var(j), &za.zone(*last), -total);
            }
        }
        let p = d.pick_point()?;
        let time = |j: usize| if j == 0 { zero } else { p[time_var(j) - 1] };
        let offset = |j: usize| p[offset_var(j) - 1];
        let at = |r: Rational| TimePoint::new(r).expect("non-negative by construction");

        let start = TimedState { state: self.start.state, clock: at(-offset(0)) };
        let steps = events
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let j = i + 1;
                let t = model.transition(s.transition.expect("event step has a transition"));
                RunStep {
                    event: t.event,
                    time: start_time + at(time(j)),
                    state: TimedState { state: s.to.state, clock: at(time(j) - offset(j)) },
                }
            })
            .collect();
        Some(TimedRun { start_time, start, steps })
    }
}

/// Outcome of a positive T-reachability query.
#[derive(Debug, Clone)]
pub struct Reachability {
    pub path: ZaRun,
    pub witness: TimedRun,
}

/// Whether `to` can be occupied exactly `duration` after being in `from`
/// with any clock value, together with a witness.
pub fn t_reachable(
    za: &ZoneAutomaton,
    model: &Tfa,
    from: StateId,
    to: StateId,
    duration: TimePoint,
) -> Option<Reachability> {
    let sources: Vec<Source> = (0..za.zones(from).len())
        .map(|zone| Source::whole(za, ExtendedState { state: from, zone }))
        .collect();
    let ex = Exploration::run(za, model, &sources, duration, EdgeFilter::All);
    let target = (0..za.zones(to).len())
        .map(|zone| ExtendedState { state: to, zone })
        .find(|&v| ex.entry_at(v, duration.value()).is_some())?;
    let (source, path) = ex.path_to(za, target, duration)?;
    let witness = path.concretize(za, model, &source.clock, TimePoint::ZERO, duration)?;
    Some(Reachability { path, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::fig1;
    use crate::run::check_run;

    fn t(s: &str) -> TimePoint {
        s.parse().unwrap()
    }

    fn setup() -> (Tfa, ZoneAutomaton) {
        let g = fig1();
        let za = ZoneAutomaton::build(&g).unwrap();
        (g, za)
    }

    #[test]
    fn tau_reach_ranges() {
        let (g, za) = setup();
        let start = za.find(&g, "x0", "[0,0]").unwrap();
        let got = tau_reach(&za, start);
        let target = za.find(&g, "x0", "(1,3]").unwrap();
        assert!(got.contains(&(target, "(1,3]".parse().unwrap())));

        let x4 = za.find(&g, "x4", "[0,1]").unwrap();
        let got: Vec<String> = tau_reach(&za, x4)
            .into_iter()
            .map(|(v, d)| format!("{} {d}", za.display(&g, v)))
            .collect();
        assert_eq!(got, ["(x4,[0,1]) [0,1]", "(x4,(1,inf)) (0,inf)"]);

        let last = za.find(&g, "x0", "(3,inf)").unwrap();
        assert_eq!(tau_reach(&za, last), [(last, "[0,inf)".parse().unwrap())]);
    }

    #[test]
    fn fig1_reachability_with_witnesses() {
        let (g, za) = setup();
        let x = |n| g.state_id(n).unwrap();
        for (from, to, dur) in [("x0", "x4", "4"), ("x0", "x2", "2"), ("x0", "x3", "2"), ("x1", "x1", "0")] {
            let r = t_reachable(&za, &g, x(from), x(to), t(dur)).unwrap_or_else(|| panic!("{from}->{to}"));
            assert!(check_run(&g, &r.witness), "{}", r.witness.display(&g));
            assert_eq!(r.witness.start.state, x(from));
            assert_eq!(r.witness.end().state, x(to));
            assert_eq!(r.witness.end_time(), r.witness.start_time + r.witness.duration());
            assert!(r.witness.end_time() <= t(dur));
            assert!(r.path.duration_range(&za).contains(t(dur)));
        }
    }

    #[test]
    fn unreachable_in_zero_time() {
        let (g, za) = setup();
        let x = |n| g.state_id(n).unwrap();
        // from x0 with the clock at 3, c then a fire at once
        assert!(t_reachable(&za, &g, x("x0"), x("x4"), t("0")).is_some());
        assert!(t_reachable(&za, &g, x("x4"), x("x0"), t("5")).is_none());
        assert!(t_reachable(&za, &g, x("x2"), x("x4"), t("3")).is_none());
    }

    #[test]
    fn lambda_from_initial_at_one() {
        let (g, za) = setup();
        let src = Source { node: za.initial()[0], clock: Interval::point(0) };
        let ex = Exploration::run(&za, &g, &[src], t("1"), EdgeFilter::Unobservable);
        let got = za.display_set(&g, &ex.at(t("1")));
        assert_eq!(got, "{(x0,[1,1]), (x1,[1,1]), (x2,[1,1]), (x3,[1,1])}");
        assert_eq!(za.display_set(&g, &ex.at(t("0"))), "{(x0,[0,0]), (x2,[0,0])}");
    }
}
