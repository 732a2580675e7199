//! Forward dynamics: evolving whole sets of coalescing walkers one time step
//! at a time, plus a single-path tracer for hop rules through branch points.
//!
//! A `PointSet` is the occupied-site view of the net started from some initial
//! condition: positions are kept sorted and deduplicated, so coalescence is
//! literally deduplication after a step. Stepping the full set is linear in
//! its size because children of sorted parents arrive almost sorted (each
//! parent emits x−1 and/or x+1).

use crate::field::{ArrowField, Kind};
use crate::lattice::{LatticePoint, Window};

/// Whether killing sites act on the walkers (`On`) or are ignored so the
/// system is the pure branching–coalescing net (`Off`).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Killing {
    On,
    Off,
}

/// Spatial boundary handling for a stepped point set.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Boundary {
    /// No boundary: the set may spread one unit per step forever.
    Unbounded,
    /// Children outside [lo, hi] are discarded.
    Absorb(i64, i64),
    /// Children outside [lo, hi] are folded back in by reflecting the
    /// overshoot. Changes the law near the walls; approximate only.
    Reflect(i64, i64),
}

/// How boundary handling relates to the unbounded law.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Exactness {
    /// The window is wide enough that no boundary effect can reach the core
    /// region within the horizon (light-cone argument); distribution equals
    /// the unbounded one.
    Exact,
    /// Boundary effects may leak into the observed region.
    Approximate,
}

/// The occupied sites of the net at one time, sorted and deduplicated.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointSet {
    pub time: i64,
    positions: Vec<i64>,
}

impl PointSet {
    /// Build from arbitrary positions; sorts, dedups, and checks parity.
    pub fn new(time: i64, mut positions: Vec<i64>) -> Self {
        for &x in &positions {
            assert!(
                (x + time) & 1 == 0,
                "position {x} at time {time} is off the even sublattice"
            );
        }
        positions.sort_unstable();
        positions.dedup();
        Self { time, positions }
    }

    /// Every valid site in [lo, hi] at the given time (the "full line" initial
    /// condition restricted to a window).
    pub fn full_line(time: i64, lo: i64, hi: i64) -> Self {
        let start = if (lo + time) & 1 == 0 { lo } else { lo + 1 };
        let positions = (0..)
            .map(|i| start + 2 * i)
            .take_while(|&x| x <= hi)
            .collect();
        Self { time, positions }
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.positions.binary_search(&x).is_ok()
    }

    /// Leftmost and rightmost occupied positions, if any.
    pub fn span(&self) -> Option<(i64, i64)> {
        match (self.positions.first(), self.positions.last()) {
            (Some(&lo), Some(&hi)) => Some((lo, hi)),
            _ => None,
        }
    }
}

/// Advance every walker one step through the environment, coalescing
/// duplicates. Killing `On` removes walkers sitting on killing sites before
/// they emit children.
pub fn step_point_set(
    field: &ArrowField,
    set: &PointSet,
    killing: Killing,
    boundary: Boundary,
) -> PointSet {
    let t = set.time;
    let mut out: Vec<i64> = Vec::with_capacity(set.positions.len() + 1);
    let push = |x: i64, out: &mut Vec<i64>| {
        let x = match boundary {
            Boundary::Unbounded => x,
            Boundary::Absorb(lo, hi) => {
                if x < lo || x > hi {
                    return;
                }
                x
            }
            Boundary::Reflect(lo, hi) => {
                if x < lo {
                    lo + (lo - x)
                } else if x > hi {
                    hi - (x - hi)
                } else {
                    x
                }
            }
        };
        // children of sorted parents arrive in nondecreasing order except for
        // the (x+1, next parent's x−1) overlap, which dedup handles below
        if out.last() != Some(&x) {
            match out.last() {
                Some(&last) if last > x => {
                    // reflection can reorder near the wall; fall back to insert
                    if let Err(pos) = out.binary_search(&x) {
                        out.insert(pos, x);
                    }
                }
                _ => out.push(x),
            }
        }
    };
    for &x in &set.positions {
        let site = LatticePoint::new(x, t);
        let outcome = field.outcome_at(site);
        if killing == Killing::On
            && (outcome.kind == Kind::Kill || outcome.kill_mark)
        {
            continue;
        }
        match outcome.kind {
            Kind::Both => {
                push(x - 1, &mut out);
                push(x + 1, &mut out);
            }
            Kind::LeftOnly => push(x - 1, &mut out),
            Kind::RightOnly => push(x + 1, &mut out),
            Kind::Kill => {
                // killing ignored: resolve via the resampled direction
                match field.resolved_web_outcome(site, crate::field::Web::Left) {
                    crate::field::Dir::Left => push(x - 1, &mut out),
                    crate::field::Dir::Right => push(x + 1, &mut out),
                }
            }
        }
    }
    PointSet {
        time: t + 1,
        positions: out,
    }
}

/// Step a point set inside a window whose buffer certifies exactness: the
/// returned tag is `Exact` when the buffer is at least the remaining horizon,
/// so nothing absorbed at the simulation edge could have reached the core.
pub fn bc_point_set(
    field: &ArrowField,
    set: &PointSet,
    killing: Killing,
    window: &Window,
    remaining_horizon: i64,
) -> (PointSet, Exactness) {
    let stepped = step_point_set(
        field,
        set,
        killing,
        Boundary::Absorb(window.sim_lo(), window.sim_hi()),
    );
    let tag = if window.buffer >= remaining_horizon {
        Exactness::Exact
    } else {
        Exactness::Approximate
    };
    (stepped, tag)
}

/// Tie-breaking rule when a traced path sits on a branch (Both) site.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HopRule {
    /// Always take the left arrow: the leftmost path of the net.
    Leftmost,
    /// Always take the right arrow.
    Rightmost,
    /// Choose uniformly from a dedicated stream, independent of everything
    /// else at the site.
    UniformHop,
}

/// Why a traced path stopped.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Termination {
    /// Walked the full horizon.
    Horizon,
    /// Died at this killing site.
    Killed(LatticePoint),
    /// Left the window before the horizon.
    ExitedWindow,
}

/// One traced path: its start, the ±1 increments actually taken, and why it
/// stopped. Final position is `start.x + steps.iter().sum::<i8> as i64` at
/// time `start.t + steps.len()`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PathTrace {
    pub start: LatticePoint,
    pub steps: Vec<i8>,
    pub termination: Termination,
}

impl PathTrace {
    pub fn end(&self) -> LatticePoint {
        let dx: i64 = self.steps.iter().map(|&s| s as i64).sum();
        LatticePoint::new(self.start.x + dx, self.start.t + self.steps.len() as i64)
    }
}

/// Follow a single walker forward for `horizon` steps under a hop rule,
/// stopping early at a killing site (when killing is on) or on leaving the
/// window (when one is given).
pub fn trace_path(
    field: &ArrowField,
    start: LatticePoint,
    rule: HopRule,
    horizon: i64,
    killing: Killing,
    window: Option<&Window>,
) -> PathTrace {
    assert!(start.is_forward(), "trace_path starts on a forward site");
    assert!(horizon >= 0);
    let mut x = start.x;
    let mut steps = Vec::with_capacity(horizon as usize);
    for i in 0..horizon {
        let t = start.t + i;
        let site = LatticePoint::new(x, t);
        let outcome = field.outcome_at(site);
        if killing == Killing::On
            && (outcome.kind == Kind::Kill || outcome.kill_mark)
        {
            return PathTrace {
                start,
                steps,
                termination: Termination::Killed(site),
            };
        }
        let dir = match outcome.kind {
            Kind::LeftOnly => crate::field::Dir::Left,
            Kind::RightOnly => crate::field::Dir::Right,
            Kind::Both => match rule {
                HopRule::Leftmost => crate::field::Dir::Left,
                HopRule::Rightmost => crate::field::Dir::Right,
                HopRule::UniformHop => {
                    let u = crate::rng::site_uniform(
                        field.params().seed,
                        x,
                        t,
                        crate::rng::STREAM_HOP,
                    );
                    if u < 0.5 {
                        crate::field::Dir::Left
                    } else {
                        crate::field::Dir::Right
                    }
                }
            },
            Kind::Kill => field.resolved_web_outcome(site, crate::field::Web::Left),
        };
        x += match dir {
            crate::field::Dir::Left => -1,
            crate::field::Dir::Right => 1,
        };
        steps.push(match dir {
            crate::field::Dir::Left => -1i8,
            crate::field::Dir::Right => 1i8,
        });
        if let Some(w) = window {
            if x < w.x_lo || x > w.x_hi {
                return PathTrace {
                    start,
                    steps,
                    termination: Termination::ExitedWindow,
                };
            }
        }
    }
    PathTrace {
        start,
        steps,
        termination: Termination::Horizon,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldParams, Mode};

    fn field(b: f64, k: f64, seed: u64) -> ArrowField {
        ArrowField::with_kill_resampling(FieldParams {
            mode: Mode::Layered,
            b,
            k,
            seed,
        })
    }

    #[test]
    fn full_line_parity_and_bounds() {
        let ps = PointSet::full_line(3, -5, 5);
        assert_eq!(ps.positions(), &[-5, -3, -1, 1, 3, 5]);
        let ps = PointSet::full_line(0, -5, 5);
        assert_eq!(ps.positions(), &[-4, -2, 0, 2, 4]);
    }

    #[test]
    fn branching_everywhere_fills_the_cone() {
        let f = field(1.0, 0.0, 9);
        let mut ps = PointSet::new(0, vec![0]);
        for step in 1..=6i64 {
            ps = step_point_set(&f, &ps, Killing::Off, Boundary::Unbounded);
            assert_eq!(ps.time, step);
            let want: Vec<i64> = (-step..=step).step_by(2).collect();
            assert_eq!(ps.positions(), &want[..], "cone at step {step}");
        }
    }

    #[test]
    fn no_branching_means_single_walker() {
        let f = field(0.0, 0.0, 17);
        let mut ps = PointSet::new(0, vec![0]);
        for _ in 0..50 {
            ps = step_point_set(&f, &ps, Killing::Off, Boundary::Unbounded);
            assert_eq!(ps.len(), 1);
        }
    }

    #[test]
    fn certain_killing_empties_the_set() {
        let f = ArrowField::new(FieldParams {
            mode: Mode::Joint,
            b: 0.0,
            k: 1.0,
            seed: 2,
        });
        let ps = PointSet::full_line(0, -10, 10);
        let next = step_point_set(&f, &ps, Killing::On, Boundary::Unbounded);
        assert!(next.is_empty());
    }

    #[test]
    fn coalescence_is_union_compatible() {
        // stepping A ∪ B equals stepping A and B separately and merging
        let f = field(0.6, 0.0, 31);
        let a = PointSet::new(0, vec![-4, 0, 2]);
        let b = PointSet::new(0, vec![-2, 0, 6]);
        let union = PointSet::new(0, vec![-4, -2, 0, 2, 6]);
        let sa = step_point_set(&f, &a, Killing::Off, Boundary::Unbounded);
        let sb = step_point_set(&f, &b, Killing::Off, Boundary::Unbounded);
        let su = step_point_set(&f, &union, Killing::Off, Boundary::Unbounded);
        let mut merged: Vec<i64> = sa
            .positions()
            .iter()
            .chain(sb.positions())
            .copied()
            .collect();
        merged.sort_unstable();
        merged.dedup();
        assert_eq!(su.positions(), &merged[..]);
    }

    #[test]
    fn absorb_discards_and_reflect_folds() {
        let f = field(1.0, 0.0, 41);
        let ps = PointSet::new(0, vec![0]);
        let absorbed = step_point_set(&f, &ps, Killing::Off, Boundary::Absorb(0, 4));
        assert_eq!(absorbed.positions(), &[1]);
        let reflected = step_point_set(&f, &ps, Killing::Off, Boundary::Reflect(0, 4));
        assert_eq!(reflected.positions(), &[1]);
    }

    #[test]
    fn buffer_certifies_exactness() {
        let f = field(0.5, 0.0, 5);
        let w = Window::new(-2, 2, 10);
        let ps = PointSet::full_line(0, w.sim_lo(), w.sim_hi());
        let (_, tag) = bc_point_set(&f, &ps, Killing::Off, &w, 10);
        assert_eq!(tag, Exactness::Exact);
        let (_, tag) = bc_point_set(&f, &ps, Killing::Off, &w, 11);
        assert_eq!(tag, Exactness::Approximate);
    }

    #[test]
    fn extremal_paths_sandwich_uniform_hop() {
        let f = field(0.8, 0.0, 77);
        let start = LatticePoint::new(0, 0);
        let horizon = 200;
        let l = trace_path(&f, start, HopRule::Leftmost, horizon, Killing::Off, None);
        let r = trace_path(&f, start, HopRule::Rightmost, horizon, Killing::Off, None);
        let u = trace_path(&f, start, HopRule::UniformHop, horizon, Killing::Off, None);
        let mut xl = 0i64;
        let mut xr = 0i64;
        let mut xu = 0i64;
        for i in 0..horizon as usize {
            xl += l.steps[i] as i64;
            xr += r.steps[i] as i64;
            xu += u.steps[i] as i64;
            assert!(xl <= xu && xu <= xr, "sandwich broken at step {i}");
        }
    }

    #[test]
    fn killed_path_reports_site() {
        let f = ArrowField::new(FieldParams {
            mode: Mode::Joint,
            b: 0.0,
            k: 1.0,
            seed: 4,
        });
        let trace = trace_path(
            &f,
            LatticePoint::new(0, 0),
            HopRule::Leftmost,
            10,
            Killing::On,
            None,
        );
        assert_eq!(trace.termination, Termination::Killed(LatticePoint::new(0, 0)));
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn window_exit_terminates() {
        let f = field(1.0, 0.0, 8);
        let w = Window::new(-2, 2, 0);
        let trace = trace_path(
            &f,
            LatticePoint::new(0, 0),
            HopRule::Rightmost,
            100,
            Killing::Off,
            Some(&w),
        );
        assert_eq!(trace.termination, Termination::ExitedWindow);
        assert_eq!(trace.steps.len(), 3);
        assert_eq!(trace.end().x, 3);
    }

    #[test]
    fn trace_end_consistency() {
        let f = field(0.5, 0.1, 123);
        let trace = trace_path(
            &f,
            LatticePoint::new(4, 2),
            HopRule::UniformHop,
            64,
            Killing::On,
            None,
        );
        let end = trace.end();
        assert_eq!(end.t - 2, trace.steps.len() as i64);
        assert!(end.is_forward());
    }
}
