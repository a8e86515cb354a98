//! Regions, enabled transition sets at a region, and the zone partition of
//! the clock values of each discrete state.

use crate::interval::{Bound, Interval};
use crate::model::{Reset, StateId, Tfa, TransitionId};

/// Largest integer constant relevant at `x`: guard endpoints of outgoing
/// transitions and of incoming `id` transitions, and reset endpoints of
/// incoming resetting transitions.
pub fn max_relevant_constant(model: &Tfa, x: StateId) -> u64 {
    relevant_intervals(model, x)
        .flat_map(|i| [Some(i.lower_value()), i.upper_value()])
        .flatten()
        .max()
        .unwrap_or(0)
}

fn relevant_intervals(model: &Tfa, x: StateId) -> impl Iterator<Item = Interval> + '_ {
    let out = model.outgoing(x).iter().map(|id| model.transition(*id).guard);
    let inc = model.incoming(x).iter().map(|id| {
        let t = model.transition(*id);
        match t.reset {
            Reset::Keep => t.guard,
            Reset::To(r) => r,
        }
    });
    out.chain(inc)
}

/// Regions `[0,0], (0,1), [1,1], ..., [M,M]` of `x`. The lower end is always
/// 0 so the initial clock value has a region.
pub fn regions(model: &Tfa, x: StateId) -> Vec<Interval> {
    Interval::closed(0, max_relevant_constant(model, x)).regions_up_to(0)
}

/// Transitions leaving `x` whose guard contains all of `r`.
pub fn output_at(model: &Tfa, x: StateId, r: &Interval) -> Vec<TransitionId> {
    model
        .outgoing(x)
        .iter()
        .copied()
        .filter(|id| r.is_subset_of(&model.transition(*id).guard))
        .collect()
}

/// Transitions entering `x` that can leave the clock anywhere in `r`: a
/// resetting transition whose reset set contains `r`, or an `id` transition
/// whose guard contains `r`.
pub fn input_at(model: &Tfa, x: StateId, r: &Interval) -> Vec<TransitionId> {
    model
        .incoming(x)
        .iter()
        .copied()
        .filter(|id| {
            let t = model.transition(*id);
            match t.reset {
                Reset::To(reset) => r.is_subset_of(&reset),
                Reset::Keep => r.is_subset_of(&t.guard),
            }
        })
        .collect()
}

/// Zones of `x` in ascending order: consecutive regions are merged while
/// they enable the same input and output transitions and none of those keeps
/// the clock; the last zone is `(M, +inf)`.
pub fn build_zones(model: &Tfa, x: StateId) -> Vec<Interval> {
    let regions = regions(model, x);
    let keeps_clock = |ids: &[TransitionId]| ids.iter().any(|id| model.transition(*id).reset.is_keep());

    let mut zones = Vec::new();
    let mut current = regions[0];
    let mut prev_out = output_at(model, x, &regions[0]);
    let mut prev_in = input_at(model, x, &regions[0]);
    for r in &regions[1..] {
        let out = output_at(model, x, r);
        let inc = input_at(model, x, r);
        if out == prev_out && inc == prev_in && !keeps_clock(&out) && !keeps_clock(&inc) {
            current = Interval::new(current.lower(), r.upper()).expect("merged regions are contiguous");
        } else {
            zones.push(current);
            current = *r;
        }
        prev_out = out;
        prev_in = inc;
    }
    zones.push(current);
    let top = current.upper_value().expect("regions are bounded");
    zones.push(Interval::new(Bound::Open(top), Bound::Infinite).expect("unbounded zone"));
    zones
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::fig1;
    use crate::time::TimePoint;

    fn names(v: &[Interval]) -> Vec<String> {
        v.iter().map(|i| i.to_string()).collect()
    }

    fn labels(model: &Tfa, ids: &[TransitionId]) -> Vec<String> {
        ids.iter().map(|id| model.transition_label(model.transition(*id))).collect()
    }

    #[test]
    fn regions_of_fig1() {
        let g = fig1();
        let x = |n| g.state_id(n).unwrap();
        assert_eq!(
            names(&regions(&g, x("x0"))),
            ["[0,0]", "(0,1)", "[1,1]", "(1,2)", "[2,2]", "(2,3)", "[3,3]"]
        );
        assert_eq!(names(&regions(&g, x("x4"))), ["[0,0]", "(0,1)", "[1,1]"]);
    }

    #[test]
    fn isolated_state_has_one_region() {
        let mut doc = fig1().to_document();
        doc.states.push("lonely".into());
        let g = Tfa::from_document(&doc).unwrap();
        let x = g.state_id("lonely").unwrap();
        assert_eq!(names(&regions(&g, x)), ["[0,0]"]);
        assert_eq!(names(&build_zones(&g, x)), ["[0,0]", "(0,inf)"]);
    }

    #[test]
    fn region_bounds_by_hand_enumeration() {
        // x4: outgoing (x4,b,x3) guard [0,1]; incoming (x1,a,x4) reset [0,1]
        let g = fig1();
        let x4 = g.state_id("x4").unwrap();
        let endpoints: Vec<u64> = vec![0, 1, 0, 1];
        assert_eq!(max_relevant_constant(&g, x4), *endpoints.iter().max().unwrap());
    }

    #[test]
    fn output_sets() {
        let g = fig1();
        let x = |n| g.state_id(n).unwrap();
        let r = |s: &str| s.parse::<Interval>().unwrap();
        assert_eq!(labels(&g, &output_at(&g, x("x0"), &r("[1,1]"))), ["(x0,c,x1)", "(x0,b,x2)"]);
        assert!(output_at(&g, x("x0"), &r("(3,inf)")).is_empty());
        assert_eq!(labels(&g, &output_at(&g, x("x2"), &r("(1,2)"))), ["(x2,c,x3)"]);
    }

    #[test]
    fn input_sets() {
        let g = fig1();
        let x = |n| g.state_id(n).unwrap();
        let r = |s: &str| s.parse::<Interval>().unwrap();
        assert_eq!(labels(&g, &input_at(&g, x("x2"), &r("[0,0]"))), ["(x0,b,x2)", "(x3,a,x2)"]);
        assert!(input_at(&g, x("x2"), &r("(1,2)")).is_empty());
        assert_eq!(labels(&g, &input_at(&g, x("x1"), &r("[1,1]"))), ["(x0,c,x1)"]);
    }

    #[test]
    fn zones_of_fig1() {
        let g = fig1();
        let z = |n| names(&build_zones(&g, g.state_id(n).unwrap()));
        assert_eq!(z("x0"), ["[0,0]", "(0,1)", "[1,1]", "(1,3]", "(3,inf)"]);
        assert_eq!(z("x1"), ["[0,1)", "[1,1]", "(1,3]", "(3,inf)"]);
        assert_eq!(z("x2"), ["[0,0]", "(0,1)", "[1,1]", "(1,2)", "[2,2]", "(2,inf)"]);
        assert_eq!(z("x3"), ["[0,0]", "(0,1)", "[1,1]", "(1,2)", "[2,2]", "(2,inf)"]);
        assert_eq!(z("x4"), ["[0,1]", "(1,inf)"]);
    }

    #[test]
    fn zones_partition_the_clock_axis() {
        let g = fig1();
        for x in g.states() {
            let zones = build_zones(&g, x);
            let top = max_relevant_constant(&g, x);
            for n in 0..=(top + 2) * 4 {
                let t = TimePoint::from_fraction(n as i64, 4);
                assert_eq!(zones.iter().filter(|z| z.contains(t)).count(), 1, "{t}");
            }
            assert!(zones.len() as u64 <= 2 * top + 2);
        }
    }
}
