//! Offline observer: belief supports discovered ahead of time, each with a
//! table from elapsed-time regions to estimates and successor supports.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};
use thiserror::Error;

use crate::automaton::{ExtendedState, ZoneAutomaton};
use crate::estimate::{event_step, BeliefState, Estimate, EstimateError};
use crate::interval::Interval;
use crate::model::{EventId, Tfa};
use crate::time::{Rational, TimePoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObserverError {
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("estimate changes inside region {region} of observer state {node}")]
    NotConstant { node: usize, region: Interval },
}

/// What an observer state stands for: the belief support, and whether the
/// clock is still at its initial value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SupportKey {
    pub support: BTreeSet<ExtendedState>,
    pub initial: bool,
}

impl SupportKey {
    fn of(b: &BeliefState) -> Self {
        SupportKey { support: b.support().clone(), initial: b.is_initial() }
    }

    fn belief(&self, za: &ZoneAutomaton, model: &Tfa, anchor: TimePoint) -> Result<BeliefState, EstimateError> {
        if self.initial {
            BeliefState::init(za, model)
        } else {
            Ok(BeliefState::from_support(self.support.clone(), anchor))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub region: Interval,
    pub estimate: BTreeSet<ExtendedState>,
    /// Observer state reached when each observable event happens in this region.
    pub successors: BTreeMap<EventId, usize>,
}

#[derive(Debug, Clone)]
pub struct OfflineObserver {
    horizon: u64,
    keys: Vec<SupportKey>,
    index: BTreeMap<SupportKey, usize>,
    tables: Vec<Vec<Cell>>,
}

/// `2 · (largest constant) · |V|`, at least 1.
pub fn default_horizon(za: &ZoneAutomaton, model: &Tfa) -> u64 {
    (2 * model.max_constant() * za.node_count() as u64).max(1)
}

/// Up to three points inside `region`, used as its representatives.
fn samples(region: &Interval) -> Vec<TimePoint> {
    let lo = Rational::from_integer(region.lower_value() as i64);
    if region.is_point() {
        return vec![TimePoint::new(lo).expect("non-negative")];
    }
    [1, 2, 3]
        .iter()
        .map(|&q| TimePoint::new(lo + Rational::new(q, 4)).expect("non-negative"))
        .collect()
}

/// Position of `dt` in `[0,0], (0,1), [1,1], ...`.
fn region_index(dt: TimePoint) -> usize {
    let k = dt.floor() as usize;
    if dt.is_integer() {
        2 * k
    } else {
        2 * k + 1
    }
}

impl OfflineObserver {
    pub fn build(za: &ZoneAutomaton, model: &Tfa, horizon: u64) -> Result<Self, ObserverError> {
        if horizon == 0 {
            return Err(ObserverError::ZeroHorizon);
        }
        let start = SupportKey::of(&BeliefState::init(za, model)?);
        let mut obs = OfflineObserver { horizon, keys: vec![start.clone()], index: BTreeMap::new(), tables: Vec::new() };
        obs.index.insert(start, 0);
        let regions = Interval::closed(0, horizon).regions_up_to(0);
        let observable: Vec<EventId> = model.observable_events().collect();
        let mut next = 0;
        while next < obs.keys.len() {
            let key = obs.keys[next].clone();
            let belief = key.belief(za, model, TimePoint::ZERO)?;
            let ex = belief.explore(za, model, TimePoint::from_integer(horizon as u32));
            let mut table = Vec::with_capacity(regions.len());
            for region in &regions {
                let points = samples(region);
                let estimate = ex.at(points[0]);
                if points[1..].iter().any(|&p| ex.at(p) != estimate) {
                    return Err(ObserverError::NotConstant { node: next, region: *region });
                }
                let mut successors = BTreeMap::new();
                for &e in &observable {
                    let succ = SupportKey { support: event_step(za, &estimate, e), initial: false };
                    let id = match obs.index.get(&succ) {
                        Some(&id) => id,
                        None => {
                            let id = obs.keys.len();
                            obs.keys.push(succ.clone());
                            obs.index.insert(succ, id);
                            id
                        }
                    };
                    successors.insert(e, id);
                }
                table.push(Cell { region: *region, estimate, successors });
            }
            obs.tables.push(table);
            next += 1;
        }
        Ok(obs)
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn state_count(&self) -> usize {
        self.keys.len()
    }

    pub fn key(&self, node: usize) -> &SupportKey {
        &self.keys[node]
    }

    pub fn find(&self, key: &SupportKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn cells(&self, node: usize) -> &[Cell] {
        &self.tables[node]
    }

    /// The table cell for `dt` after entering `node`; `None` past the horizon.
    pub fn lookup(&self, node: usize, dt: TimePoint) -> Option<&Cell> {
        self.tables[node].get(region_index(dt))
    }

    /// Starts tracking an observation sequence from the initial state.
    pub fn cursor(&self) -> Cursor {
        Cursor::Table { node: 0, anchor: TimePoint::ZERO }
    }

    /// Applies an observation, falling back to the online estimator past the
    /// horizon.
    pub fn advance(
        &self,
        za: &ZoneAutomaton,
        model: &Tfa,
        cursor: &Cursor,
        e: EventId,
        t: TimePoint,
    ) -> Result<Cursor, EstimateError> {
        if !model.is_observable(e) {
            return Err(EstimateError::Unobservable(model.event_name(e).to_string()));
        }
        let anchor = cursor.anchor();
        let dt = t.since(anchor).ok_or(EstimateError::BeforeAnchor { time: t, anchor })?;
        if let Cursor::Table { node, .. } = cursor {
            if let Some(cell) = self.lookup(*node, dt) {
                return Ok(Cursor::Table { node: cell.successors[&e], anchor: t });
            }
        }
        let belief = self.belief_of(za, model, cursor)?.advance(za, model, e, t)?;
        Ok(match self.find(&SupportKey::of(&belief)) {
            Some(node) => Cursor::Table { node, anchor: t },
            None => Cursor::Online(belief),
        })
    }

    pub fn query(&self, za: &ZoneAutomaton, model: &Tfa, cursor: &Cursor, t: TimePoint) -> Result<Estimate, EstimateError> {
        let anchor = cursor.anchor();
        let dt = t.since(anchor).ok_or(EstimateError::BeforeAnchor { time: t, anchor })?;
        if let Cursor::Table { node, .. } = cursor {
            if let Some(cell) = self.lookup(*node, dt) {
                return Ok(Estimate::new(cell.estimate.clone(), anchor));
            }
        }
        self.belief_of(za, model, cursor)?.query(za, model, t)
    }

    fn belief_of(&self, za: &ZoneAutomaton, model: &Tfa, cursor: &Cursor) -> Result<BeliefState, EstimateError> {
        match cursor {
            Cursor::Table { node, anchor } => self.keys[*node].belief(za, model, *anchor),
            Cursor::Online(b) => Ok(b.clone()),
        }
    }

    pub fn to_json(&self, za: &ZoneAutomaton, model: &Tfa) -> Value {
        let set = |s: &BTreeSet<ExtendedState>| -> Vec<[String; 2]> {
            za.sorted_by_name(model, s.iter().copied())
                .into_iter()
                .map(|v| [model.state_name(v.state).to_string(), za.zone(v).to_string()])
                .collect()
        };
        let states: Vec<Value> = self
            .keys
            .iter()
            .zip(&self.tables)
            .enumerate()
            .map(|(id, (key, table))| {
                let cells: Vec<Value> = table
                    .iter()
                    .map(|c| {
                        let succ: BTreeMap<&str, usize> =
                            c.successors.iter().map(|(e, n)| (model.event_name(*e), *n)).collect();
                        json!({ "region": c.region.to_string(), "estimate": set(&c.estimate), "successors": succ })
                    })
                    .collect();
                json!({ "id": id, "support": set(&key.support), "initial": key.initial, "cells": cells })
            })
            .collect();
        json!({ "horizon": self.horizon, "states": states })
    }
}

/// Position of an observation sequence in an observer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cursor {
    Table { node: usize, anchor: TimePoint },
    Online(BeliefState),
}

impl Cursor {
    pub fn anchor(&self) -> TimePoint {
        match self {
            Cursor::Table { anchor, .. } => *anchor,
            Cursor::Online(b) => b.anchor(),
        }
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
    fn region_positions() {
        assert_eq!(region_index(t("0")), 0);
        assert_eq!(region_index(t("0.5")), 1);
        assert_eq!(region_index(t("3")), 6);
        assert_eq!(region_index(t("3.9")), 7);
    }

    #[test]
    fn fig1_tables() {
        let (g, za) = setup();
        let obs = OfflineObserver::build(&za, &g, 4).unwrap();
        let names = |s: &BTreeSet<ExtendedState>| Estimate::new(s.clone(), TimePoint::ZERO).render(&g);
        assert_eq!(names(&obs.lookup(0, t("0")).unwrap().estimate), "x0 x2");
        assert_eq!(names(&obs.lookup(0, t("0.5")).unwrap().estimate), "x0 x2");
        assert_eq!(names(&obs.lookup(0, t("1")).unwrap().estimate), "x0 x1 x2 x3");
        assert!(obs.lookup(0, t("4.5")).is_none());

        let after_a = SupportKey {
            support: [za.find(&g, "x2", "[0,0]").unwrap(), za.find(&g, "x4", "[0,1]").unwrap()].into(),
            initial: false,
        };
        let node = obs.find(&after_a).expect("support discovered");
        assert_eq!(names(&obs.lookup(node, t("1")).unwrap().estimate), "x2 x3 x4");
        let a = g.event_id("a").unwrap();
        assert_eq!(obs.lookup(0, t("1")).unwrap().successors[&a], node);
    }

    #[test]
    fn cursor_matches_online_and_falls_back() {
        let (g, za) = setup();
        let obs = OfflineObserver::build(&za, &g, 3).unwrap();
        let a = g.event_id("a").unwrap();
        let c0 = obs.cursor();
        let c1 = obs.advance(&za, &g, &c0, a, t("1")).unwrap();
        assert!(matches!(c1, Cursor::Table { .. }));
        assert_eq!(obs.query(&za, &g, &c1, t("3")).unwrap().render(&g), "x2 x3 x4");
        // 4.5 time units after the anchor is past the table
        let far = obs.query(&za, &g, &c1, t("5.5")).unwrap();
        let online = BeliefState::init(&za, &g).unwrap().advance(&za, &g, a, t("1")).unwrap();
        assert_eq!(far, online.query(&za, &g, t("5.5")).unwrap());
        let c2 = obs.advance(&za, &g, &c1, a, t("3")).unwrap();
        assert_eq!(obs.query(&za, &g, &c2, t("4")).unwrap().render(&g), "x2 x3");
    }

    #[test]
    fn default_horizon_for_fig1() {
        let (g, za) = setup();
        assert_eq!(default_horizon(&za, &g), 2 * 3 * 23);
    }

    #[test]
    fn serialization_is_deterministic() {
        let (g, za) = setup();
        let a = OfflineObserver::build(&za, &g, 2).unwrap().to_json(&za, &g).to_string();
        let b = OfflineObserver::build(&za, &g, 2).unwrap().to_json(&za, &g).to_string();
        assert_eq!(a, b);
        assert!(a.starts_with(r#"{"horizon":2,"states":[{"cells":[{"estimate":[["x0","[0,0]"],["x2","[0,0]"]]"#));
    }
}
