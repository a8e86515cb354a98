pub mod automaton;
pub mod dbm;
pub mod differential;
pub mod estimate;
pub mod interval;
pub mod model;
pub mod observer;
pub mod oracle;
pub mod random;
pub mod reach;
pub mod run;
pub mod time;
pub mod zones;

pub use automaton::{BuildError, ExtendedState, Label, ZaEdge, ZoneAutomaton};
pub use interval::{Bound, Interval, IntervalError};
pub use model::{Diagnostic, EventId, ModelDocument, ModelError, Reset, StateId, Tfa, Transition, TransitionId};
pub use run::{check_run, project, project_logical, ObservationError, TimedObservation, TimedRun, TimedState};
pub use time::{TimeParseError, TimePoint};
