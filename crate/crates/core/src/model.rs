//! Single-clock timed finite automata: states, events, guarded transitions
//! with interval resets, and the JSON model document.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::interval::{Interval, IntervalError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionId(pub usize);

/// What happens to the clock when a transition fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reset {
    /// `id`: the clock keeps running.
    Keep,
    /// The clock jumps to any value of the interval.
    To(Interval),
}

impl Reset {
    pub fn interval(&self) -> Option<&Interval> {
        match self {
            Reset::Keep => None,
            Reset::To(i) => Some(i),
        }
    }

    pub fn is_keep(&self) -> bool {
        matches!(self, Reset::Keep)
    }
}

impl fmt::Display for Reset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reset::Keep => f.write_str("id"),
            Reset::To(i) => i.fmt(f),
        }
    }
}

impl FromStr for Reset {
    type Err = IntervalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "id" {
            Ok(Reset::Keep)
        } else {
            s.parse().map(Reset::To)
        }
    }
}

impl Serialize for Reset {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Reset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub source: StateId,
    pub event: EventId,
    pub target: StateId,
    pub guard: Interval,
    pub reset: Reset,
}

/// A problem found while resolving or validating a model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Diagnostic {
    #[error("state `{0}` is declared more than once")]
    DuplicateState(String),
    #[error("event `{0}` is declared more than once")]
    DuplicateEvent(String),
    #[error("transition {transition}: unknown state `{name}`")]
    UnknownState { transition: String, name: String },
    #[error("transition {transition}: unknown event `{name}`")]
    UnknownEvent { transition: String, name: String },
    #[error("observable event `{0}` is not in the alphabet")]
    UnknownObservable(String),
    #[error("initial state `{0}` is not declared")]
    UnknownInitial(String),
    #[error("model has no initial state")]
    NoInitialState,
    #[error("transition {0} appears more than once")]
    DuplicateTransition(String),
    #[error("transition {transition}: guard {guard} is not a closed interval")]
    GuardNotClosed { transition: String, guard: Interval },
    #[error("transition {transition}: reset {reset} is not a closed interval")]
    ResetNotClosed { transition: String, reset: Interval },
    #[error("transition {0}: observable event does not reset the clock (RO violated)")]
    RoViolation(String),
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot read model: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed model document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid model: {}", render_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
}

fn render_diagnostics(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

/// Serialized form of one transition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDocument {
    pub from: String,
    pub event: String,
    pub to: String,
    pub guard: Interval,
    pub reset: Reset,
}

/// The on-disk JSON model.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ModelDocument {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub observable: Vec<String>,
    pub initial: Vec<String>,
    pub transitions: Vec<TransitionDocument>,
}

/// A timed finite automaton with an observable/unobservable alphabet split.
/// The clock starts at 0.
#[derive(Debug, Clone)]
pub struct Tfa {
    states: Vec<String>,
    events: Vec<String>,
    observable: Vec<bool>,
    initial: Vec<StateId>,
    transitions: Vec<Transition>,
    state_index: HashMap<String, StateId>,
    event_index: HashMap<String, EventId>,
    outgoing: Vec<Vec<TransitionId>>,
    incoming: Vec<Vec<TransitionId>>,
}

impl Tfa {
    pub fn from_json(text: &str) -> Result<Tfa, ModelError> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        Tfa::from_document(&doc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Tfa, ModelError> {
        Tfa::from_json(&std::fs::read_to_string(path)?)
    }

    /// Resolves names. Fails with every name-level problem at once; semantic
    /// checks are left to [`Tfa::validate`].
    pub fn from_document(doc: &ModelDocument) -> Result<Tfa, ModelError> {
        let mut diags = Vec::new();

        let mut state_index = HashMap::new();
        for (i, name) in doc.states.iter().enumerate() {
            if state_index.insert(name.clone(), StateId(i)).is_some() {
                diags.push(Diagnostic::DuplicateState(name.clone()));
            }
        }
        let mut event_index = HashMap::new();
        for (i, name) in doc.alphabet.iter().enumerate() {
            if event_index.insert(name.clone(), EventId(i)).is_some() {
                diags.push(Diagnostic::DuplicateEvent(name.clone()));
            }
        }

        let mut observable = vec![false; doc.alphabet.len()];
        for name in &doc.observable {
            match event_index.get(name) {
                Some(e) => observable[e.0] = true,
                None => diags.push(Diagnostic::UnknownObservable(name.clone())),
            }
        }

        let mut initial = BTreeSet::new();
        for name in &doc.initial {
            match state_index.get(name) {
                Some(x) => {
                    initial.insert(*x);
                }
                None => diags.push(Diagnostic::UnknownInitial(name.clone())),
            }
        }

        let mut transitions = Vec::with_capacity(doc.transitions.len());
        for t in &doc.transitions {
            let label = format!("({},{},{})", t.from, t.event, t.to);
            let mut state = |name: &String| {
                let found = state_index.get(name).copied();
                if found.is_none() {
                    diags.push(Diagnostic::UnknownState { transition: label.clone(), name: name.clone() });
                }
                found
            };
            let source = state(&t.from);
            let target = state(&t.to);
            let event = event_index.get(&t.event).copied();
            if event.is_none() {
                diags.push(Diagnostic::UnknownEvent { transition: label.clone(), name: t.event.clone() });
            }
            if let (Some(source), Some(event), Some(target)) = (source, event, target) {
                transitions.push(Transition { source, event, target, guard: t.guard, reset: t.reset });
            }
        }

        if !diags.is_empty() {
            return Err(ModelError::Invalid(diags));
        }

        let mut outgoing = vec![Vec::new(); doc.states.len()];
        let mut incoming = vec![Vec::new(); doc.states.len()];
        for (i, t) in transitions.iter().enumerate() {
            outgoing[t.source.0].push(TransitionId(i));
            incoming[t.target.0].push(TransitionId(i));
        }

        Ok(Tfa {
            states: doc.states.clone(),
            events: doc.alphabet.clone(),
            observable,
            initial: initial.into_iter().collect(),
            transitions,
            state_index,
            event_index,
            outgoing,
            incoming,
        })
    }

    pub fn to_document(&self) -> ModelDocument {
        ModelDocument {
            states: self.states.clone(),
            alphabet: self.events.clone(),
            observable: self
                .events()
                .filter(|e| self.is_observable(*e))
                .map(|e| self.event_name(e).to_string())
                .collect(),
            initial: self.initial.iter().map(|x| self.state_name(*x).to_string()).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| TransitionDocument {
                    from: self.state_name(t.source).to_string(),
                    event: self.event_name(t.event).to_string(),
                    to: self.state_name(t.target).to_string(),
                    guard: t.guard,
                    reset: t.reset,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("model documents always serialize")
    }

    /// Structural checks. Empty iff the model is well formed (and satisfies
    /// RO when `require_ro` is set).
    pub fn validate(&self, require_ro: bool) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        if self.initial.is_empty() {
            diags.push(Diagnostic::NoInitialState);
        }
        let mut seen = BTreeSet::new();
        for t in &self.transitions {
            let label = self.transition_label(t);
            if !seen.insert((t.source, t.event, t.target)) {
                diags.push(Diagnostic::DuplicateTransition(label.clone()));
            }
            if !t.guard.is_closed() {
                diags.push(Diagnostic::GuardNotClosed { transition: label.clone(), guard: t.guard });
            }
            match t.reset {
                Reset::To(r) if !r.is_closed() => {
                    diags.push(Diagnostic::ResetNotClosed { transition: label.clone(), reset: r });
                }
                Reset::Keep if require_ro && self.is_observable(t.event) => {
                    diags.push(Diagnostic::RoViolation(label));
                }
                _ => {}
            }
        }
        diags
    }

    /// Every observable transition resets the clock.
    pub fn satisfies_ro(&self) -> bool {
        self.transitions.iter().all(|t| !self.is_observable(t.event) || !t.reset.is_keep())
    }

    pub fn transition_label(&self, t: &Transition) -> String {
        format!(
            "({},{},{})",
            self.state_name(t.source),
            self.event_name(t.event),
            self.state_name(t.target)
        )
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> {
        (0..self.events.len()).map(EventId)
    }

    pub fn observable_events(&self) -> impl Iterator<Item = EventId> + '_ {
        self.events().filter(|e| self.is_observable(*e))
    }

    pub fn state_name(&self, x: StateId) -> &str {
        &self.states[x.0]
    }

    pub fn event_name(&self, e: EventId) -> &str {
        &self.events[e.0]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn event_id(&self, name: &str) -> Option<EventId> {
        self.event_index.get(name).copied()
    }

    pub fn is_observable(&self, e: EventId) -> bool {
        self.observable[e.0]
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, id: TransitionId) -> &Transition {
        &self.transitions[id.0]
    }

    /// Transition ids leaving `x`, in declaration order.
    pub fn outgoing(&self, x: StateId) -> &[TransitionId] {
        &self.outgoing[x.0]
    }

    /// Transition ids entering `x`, in declaration order.
    pub fn incoming(&self, x: StateId) -> &[TransitionId] {
        &self.incoming[x.0]
    }

    /// Largest finite constant in any guard or reset.
    pub fn max_constant(&self) -> u64 {
        self.transitions
            .iter()
            .flat_map(|t| {
                let reset = t.reset.interval().and_then(|r| r.upper_value());
                [t.guard.upper_value(), reset, Some(t.guard.lower_value())]
            })
            .flatten()
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const FIG1: &str = include_str!("../examples/fig1.json");

    pub(crate) fn fig1() -> Tfa {
        Tfa::from_json(FIG1).unwrap()
    }

    fn with_transition(doc: &mut ModelDocument, from: &str, to: &str, f: impl FnOnce(&mut TransitionDocument)) {
        let t = doc.transitions.iter_mut().find(|t| t.from == from && t.to == to).unwrap();
        f(t);
    }

    #[test]
    fn fig1_is_valid_and_ro() {
        let g = fig1();
        assert_eq!(g.validate(true), vec![]);
        assert!(g.satisfies_ro());
        assert_eq!(g.state_count(), 5);
        assert_eq!(g.transitions().len(), 6);
        assert_eq!(g.max_constant(), 3);
        let observable: Vec<_> = g.observable_events().map(|e| g.event_name(e)).collect();
        assert_eq!(observable, ["a"]);
    }

    #[test]
    fn ro_violation_is_reported() {
        let mut doc = fig1().to_document();
        with_transition(&mut doc, "x1", "x4", |t| t.reset = Reset::Keep);
        let g = Tfa::from_document(&doc).unwrap();
        assert_eq!(g.validate(true), vec![Diagnostic::RoViolation("(x1,a,x4)".into())]);
        assert_eq!(g.validate(false), vec![]);
        assert!(!g.satisfies_ro());
    }

    #[test]
    fn open_guard_is_reported() {
        let mut doc = fig1().to_document();
        with_transition(&mut doc, "x0", "x1", |t| t.guard = "(1,3)".parse().unwrap());
        let g = Tfa::from_document(&doc).unwrap();
        assert_eq!(
            g.validate(false),
            vec![Diagnostic::GuardNotClosed { transition: "(x0,c,x1)".into(), guard: "(1,3)".parse().unwrap() }]
        );
    }

    #[test]
    fn unbounded_reset_is_reported() {
        let mut doc = fig1().to_document();
        with_transition(&mut doc, "x3", "x2", |t| t.reset = "(0,inf)".parse().unwrap());
        let g = Tfa::from_document(&doc).unwrap();
        assert!(matches!(g.validate(true).as_slice(), [Diagnostic::ResetNotClosed { .. }]));
    }

    #[test]
    fn name_errors_are_collected() {
        let mut doc = fig1().to_document();
        doc.transitions[0].to = "nowhere".into();
        doc.transitions[1].event = "z".into();
        doc.observable.push("q".into());
        doc.initial.push("x9".into());
        let Err(ModelError::Invalid(diags)) = Tfa::from_document(&doc) else {
            panic!("expected resolution failure");
        };
        assert_eq!(diags.len(), 4);
    }

    #[test]
    fn missing_initial_and_duplicates() {
        let mut doc = fig1().to_document();
        doc.initial.clear();
        let dup = doc.transitions[0].clone();
        doc.transitions.push(dup);
        let g = Tfa::from_document(&doc).unwrap();
        let diags = g.validate(false);
        assert!(diags.contains(&Diagnostic::NoInitialState));
        assert!(diags.contains(&Diagnostic::DuplicateTransition("(x0,c,x1)".into())));
    }

    #[test]
    fn malformed_json_and_empty_interval() {
        assert!(matches!(Tfa::from_json("{"), Err(ModelError::Json(_))));
        let bad = FIG1.replace("\"[1,3]\"", "\"[3,1]\"");
        assert!(matches!(Tfa::from_json(&bad), Err(ModelError::Json(_))));
    }

    #[test]
    fn document_round_trip_is_identity() {
        let g = fig1();
        let doc = g.to_document();
        let again = Tfa::from_json(&g.to_json()).unwrap();
        assert_eq!(again.to_document(), doc);
    }

    #[test]
    fn reset_text_form() {
        assert_eq!("id".parse::<Reset>().unwrap(), Reset::Keep);
        assert_eq!("[0,1]".parse::<Reset>().unwrap(), Reset::To(Interval::closed(0, 1)));
        assert_eq!(Reset::Keep.to_string(), "id");
        assert!("ident".parse::<Reset>().is_err());
    }
}
