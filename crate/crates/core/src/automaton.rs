//! The zone automaton: an NFA over extended states `(x, z)` with `τ` edges
//! for time elapse and event edges for transitions.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::interval::Interval;
use crate::model::{Diagnostic, EventId, Reset, StateId, Tfa, TransitionId};
use crate::time::TimePoint;
use crate::zones::build_zones;

/// A discrete state paired with one of its zones (by position in the
/// ascending zone list).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtendedState {
    pub state: StateId,
    pub zone: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Tau,
    Event(EventId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZaEdge {
    pub from: ExtendedState,
    pub label: Label,
    pub to: ExtendedState,
    /// The model transition behind an event edge.
    pub transition: Option<TransitionId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("model is not well formed: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidModel(Vec<Diagnostic>),
    #[error("transition {transition} keeps the clock but zone {zone} of the source is not a zone of the target")]
    KeptZoneMissing { transition: String, zone: Interval },
}

#[derive(Debug, Clone)]
pub struct ZoneAutomaton {
    zones: Vec<Vec<Interval>>,
    offsets: Vec<usize>,
    edges: Vec<ZaEdge>,
    out: Vec<Vec<usize>>,
    initial: Vec<ExtendedState>,
}

impl ZoneAutomaton {
    pub fn build(model: &Tfa) -> Result<ZoneAutomaton, BuildError> {
        let diags = model.validate(false);
        if !diags.is_empty() {
            return Err(BuildError::InvalidModel(diags));
        }

        let zones: Vec<Vec<Interval>> = model.states().map(|x| build_zones(model, x)).collect();
        let mut offsets = Vec::with_capacity(zones.len());
        let mut total = 0;
        for z in &zones {
            offsets.push(total);
            total += z.len();
        }

        let mut edges = Vec::new();
        for x in model.states() {
            for i in 0..zones[x.0].len() - 1 {
                edges.push(ZaEdge {
                    from: ExtendedState { state: x, zone: i },
                    label: Label::Tau,
                    to: ExtendedState { state: x, zone: i + 1 },
                    transition: None,
                });
            }
        }
        for (i, t) in model.transitions().iter().enumerate() {
            for (zi, z) in zones[t.source.0].iter().enumerate() {
                if !z.is_subset_of(&t.guard) {
                    continue;
                }
                let from = ExtendedState { state: t.source, zone: zi };
                let target_zones = &zones[t.target.0];
                let mut push = |zone: usize| {
                    edges.push(ZaEdge {
                        from,
                        label: Label::Event(t.event),
                        to: ExtendedState { state: t.target, zone },
                        transition: Some(TransitionId(i)),
                    })
                };
                match t.reset {
                    Reset::To(r) => {
                        for (zj, zt) in target_zones.iter().enumerate() {
                            if zt.is_subset_of(&r) {
                                push(zj);
                            }
                        }
                    }
                    Reset::Keep => match target_zones.iter().position(|zt| zt == z) {
                        Some(zj) => push(zj),
                        None => {
                            return Err(BuildError::KeptZoneMissing {
                                transition: model.transition_label(t),
                                zone: *z,
                            })
                        }
                    },
                }
            }
        }

        let mut out = vec![Vec::new(); total];
        for (i, e) in edges.iter().enumerate() {
            out[offsets[e.from.state.0] + e.from.zone].push(i);
        }
        let initial = model.initial().iter().map(|&x| ExtendedState { state: x, zone: 0 }).collect();

        Ok(ZoneAutomaton { zones, offsets, edges, out, initial })
    }

    pub fn zones(&self, x: StateId) -> &[Interval] {
        &self.zones[x.0]
    }

    pub fn zone(&self, v: ExtendedState) -> Interval {
        self.zones[v.state.0][v.zone]
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    pub fn node_index(&self, v: ExtendedState) -> usize {
        self.offsets[v.state.0] + v.zone
    }

    pub fn extended_states(&self) -> impl Iterator<Item = ExtendedState> + '_ {
        self.zones
            .iter()
            .enumerate()
            .flat_map(|(x, zs)| (0..zs.len()).map(move |zone| ExtendedState { state: StateId(x), zone }))
    }

    pub fn edges(&self) -> &[ZaEdge] {
        &self.edges
    }

    pub fn out_edges(&self, v: ExtendedState) -> impl Iterator<Item = &ZaEdge> {
        self.out[self.node_index(v)].iter().map(|&i| &self.edges[i])
    }

    pub fn out_edge_indices(&self, v: ExtendedState) -> impl Iterator<Item = usize> + '_ {
        self.out[self.node_index(v)].iter().copied()
    }

    pub fn initial(&self) -> &[ExtendedState] {
        &self.initial
    }

    pub fn tau_successor(&self, v: ExtendedState) -> Option<ExtendedState> {
        (v.zone + 1 < self.zones[v.state.0].len()).then_some(ExtendedState { state: v.state, zone: v.zone + 1 })
    }

    /// Targets of `e`-labelled edges leaving `v`.
    pub fn event_successors(&self, v: ExtendedState, e: EventId) -> impl Iterator<Item = ExtendedState> + '_ {
        self.out_edges(v).filter(move |edge| edge.label == Label::Event(e)).map(|edge| edge.to)
    }

    /// The extended state whose zone holds `clock`.
    pub fn locate(&self, x: StateId, clock: TimePoint) -> ExtendedState {
        let zone = self.zones[x.0]
            .iter()
            .position(|z| z.contains(clock))
            .expect("zones cover the clock axis");
        ExtendedState { state: x, zone }
    }

    /// Looks up `(x, z)` by state name and zone text.
    pub fn find(&self, model: &Tfa, state: &str, zone: &str) -> Option<ExtendedState> {
        let x = model.state_id(state)?;
        let z: Interval = zone.parse().ok()?;
        let zone = self.zones[x.0].iter().position(|candidate| *candidate == z)?;
        Some(ExtendedState { state: x, zone })
    }

    pub fn display<'a>(&'a self, model: &'a Tfa, v: ExtendedState) -> impl fmt::Display + 'a {
        ExtendedDisplay { za: self, model, v }
    }

    /// `{(x,z), ...}` in canonical order.
    pub fn display_set(&self, model: &Tfa, set: &BTreeSet<ExtendedState>) -> String {
        let items: Vec<String> = self
            .sorted_by_name(model, set.iter().copied())
            .into_iter()
            .map(|v| format!("({},{})", model.state_name(v.state), self.zone(v)))
            .collect();
        format!("{{{}}}", items.join(", "))
    }

    /// Orders by state name, then zone position.
    pub fn sorted_by_name(&self, model: &Tfa, set: impl IntoIterator<Item = ExtendedState>) -> Vec<ExtendedState> {
        let mut v: Vec<_> = set.into_iter().collect();
        v.sort_by(|a, b| model.state_name(a.state).cmp(model.state_name(b.state)).then(a.zone.cmp(&b.zone)));
        v
    }

    /// Graphviz rendering with nodes named `"x0 [0,0]"`; `τ` edges are dashed.
    pub fn to_dot(&self, model: &Tfa) -> String {
        let node = |v: ExtendedState| format!("\"{} {}\"", model.state_name(v.state), self.zone(v));
        let all = self.sorted_by_name(model, self.extended_states());
        let rank: std::collections::HashMap<ExtendedState, usize> =
            all.iter().enumerate().map(|(i, v)| (*v, i)).collect();

        let mut edges: Vec<&ZaEdge> = self.edges.iter().collect();
        let label_name = |l: &Label| match l {
            Label::Tau => String::new(),
            Label::Event(e) => model.event_name(*e).to_string(),
        };
        edges.sort_by(|a, b| {
            rank[&a.from]
                .cmp(&rank[&b.from])
                .then_with(|| label_name(&a.label).cmp(&label_name(&b.label)))
                .then_with(|| rank[&a.to].cmp(&rank[&b.to]))
        });

        let mut out = String::from("digraph zone_automaton {\n  rankdir=LR;\n");
        for v in &all {
            let shape = if self.initial.contains(v) { "doublecircle" } else { "ellipse" };
            let _ = writeln!(out, "  {} [shape={shape}];", node(*v));
        }
        for e in edges {
            match e.label {
                Label::Tau => {
                    let _ = writeln!(out, "  {} -> {} [label=\"τ\", style=dashed];", node(e.from), node(e.to));
                }
                Label::Event(ev) => {
                    let _ = writeln!(
                        out,
                        "  {} -> {} [label=\"{}\"];",
                        node(e.from),
                        node(e.to),
                        model.event_name(ev)
                    );
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

struct ExtendedDisplay<'a> {
    za: &'a ZoneAutomaton,
    model: &'a Tfa,
    v: ExtendedState,
}

impl fmt::Display for ExtendedDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.model.state_name(self.v.state), self.za.zone(self.v))
    }
}
