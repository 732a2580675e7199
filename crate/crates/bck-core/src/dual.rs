//! Backward (dual) paths and the wedge walk that decides, without ever
//! simulating the forward system, whether a site belongs to the net started
//! from the full line at an earlier time.
//!
//! Dual paths live on the odd sublattice and walk backward in time. The dual
//! image of a forward web is obtained by rotating each forward arrow 180°: a
//! forward step to the left forces the dual path at the site above to slide
//! right, and vice versa, so dual and forward paths of the same web can touch
//! but never cross.
//!
//! The membership test for a point (x,t) against the net started at time s
//! runs two dual walls: `l̂` from (x+1,t) driven by the left web and `r̂` from
//! (x−1,t) driven by the right web. The walls straddle every forward path
//! that ends at (x,t), so (x,t) is reachable from the full line at time s
//! exactly when the walls stay apart on all rows down to s. Their distance
//! starts at 2, moves by {+2, 0, −2} per backward step, and meeting is
//! absorbing. The first meeting row pins the point's age exactly: meeting
//! after d backward steps means the point is reachable from time t−d+1 but
//! not from t−d, i.e. its age is d−1.

use crate::field::{ArrowField, Dir, Web};
use crate::lattice::LatticePoint;

/// One backward step of a dual path: the forward site directly below decides.
/// A forward left-step rotates to a dual right-step and vice versa.
#[inline]
pub fn dual_step(field: &ArrowField, pos: LatticePoint, web: Web) -> LatticePoint {
    debug_assert!(pos.is_dual(), "dual paths live on odd sites; got {pos}");
    let below = LatticePoint::new(pos.x, pos.t - 1);
    let dx = match field.resolved_web_outcome(below, web) {
        Dir::Left => 1,
        Dir::Right => -1,
    };
    LatticePoint::new(pos.x + dx, pos.t - 1)
}

/// Follow a dual path for `depth` backward steps; returns the x-positions at
/// times start.t, start.t−1, …, start.t−depth (so `depth + 1` entries).
pub fn trace_dual(
    field: &ArrowField,
    start: LatticePoint,
    web: Web,
    depth: u64,
) -> Vec<i64> {
    assert!(start.is_dual(), "trace_dual starts on a dual (odd) site");
    let mut pos = start;
    let mut xs = Vec::with_capacity(depth as usize + 1);
    xs.push(pos.x);
    for _ in 0..depth {
        pos = dual_step(field, pos, web);
        xs.push(pos.x);
    }
    xs
}

/// The recorded pair of dual walls around a point, with the depth at which
/// they first met (meeting is absorbing; `None` means censored at the
/// requested depth).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WedgeWalk {
    /// Left-web wall positions at times t, t−1, … (starts at x+1).
    pub l_hat: Vec<i64>,
    /// Right-web wall positions at the same times (starts at x−1).
    pub r_hat: Vec<i64>,
    /// Backward steps after which the walls first coincided.
    pub meet_depth: Option<u64>,
}

/// Run both dual walls around (x,t) down to at most `max_depth` backward
/// steps, stopping at the first meeting.
pub fn wedge_walk(field: &ArrowField, x: i64, t: i64, max_depth: u64) -> WedgeWalk {
    assert!((x + t) & 1 == 0, "wedge walk is anchored at a forward site");
    let mut l = LatticePoint::new(x + 1, t);
    let mut r = LatticePoint::new(x - 1, t);
    let mut l_hat = vec![l.x];
    let mut r_hat = vec![r.x];
    let mut meet_depth = None;
    for d in 1..=max_depth {
        l = dual_step(field, l, Web::Left);
        r = dual_step(field, r, Web::Right);
        l_hat.push(l.x);
        r_hat.push(r.x);
        debug_assert!(l.x >= r.x, "walls crossed at depth {d}");
        if l.x == r.x {
            meet_depth = Some(d);
            break;
        }
    }
    WedgeWalk {
        l_hat,
        r_hat,
        meet_depth,
    }
}

/// Whether x belongs to the net at time t started from the full line at time
/// s (killing ignored). Runs the two dual walls without allocating; cost is
/// O(t−s) field queries, independent of how wide the forward system is.
pub fn membership(field: &ArrowField, x: i64, t: i64, s: i64) -> bool {
    assert!((x + t) & 1 == 0, "membership asks about a forward site");
    assert!(s <= t, "start time s = {s} must not exceed query time t = {t}");
    let mut l = LatticePoint::new(x + 1, t);
    let mut r = LatticePoint::new(x - 1, t);
    for _ in 0..(t - s) {
        l = dual_step(field, l, Web::Left);
        r = dual_step(field, r, Web::Right);
        if l.x == r.x {
            return false;
        }
    }
    true
}

/// Age of a point in backward steps: how far back the full-line start can be
/// pushed while keeping the point reachable.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Age {
    /// The walls met; the age is known exactly.
    Exact(u64),
    /// The walls were still apart at the probed depth; the age is ≥ this.
    Censored(u64),
}

impl Age {
    /// Whether the age is certainly at least `eps_steps`. For a censored age
    /// this needs the censoring depth to reach `eps_steps`.
    pub fn at_least(&self, eps_steps: u64) -> bool {
        match *self {
            Age::Exact(a) => a >= eps_steps,
            Age::Censored(d) => d >= eps_steps,
        }
    }
}

/// Age of (x,t), probing at most `max_depth` backward steps.
pub fn age_at(field: &ArrowField, x: i64, t: i64, max_depth: u64) -> Age {
    assert!((x + t) & 1 == 0, "age is defined at forward sites");
    let mut l = LatticePoint::new(x + 1, t);
    let mut r = LatticePoint::new(x - 1, t);
    for d in 1..=max_depth {
        l = dual_step(field, l, Web::Left);
        r = dual_step(field, r, Web::Right);
        if l.x == r.x {
            return Age::Exact(d - 1);
        }
    }
    Age::Censored(max_depth)
}

/// A space-time rectangle of lattice sites.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct LatticeBox {
    pub x_lo: i64,
    pub x_hi: i64,
    pub t_lo: i64,
    pub t_hi: i64,
}

impl LatticeBox {
    pub fn new(x_lo: i64, x_hi: i64, t_lo: i64, t_hi: i64) -> Self {
        assert!(x_lo <= x_hi && t_lo <= t_hi, "degenerate box");
        Self {
            x_lo,
            x_hi,
            t_lo,
            t_hi,
        }
    }

    /// Every forward (even-parity) site inside the box.
    pub fn forward_sites(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        (self.t_lo..=self.t_hi).flat_map(move |t| {
            let start = if (self.x_lo + t) & 1 == 0 {
                self.x_lo
            } else {
                self.x_lo + 1
            };
            (0..)
                .map(move |i| start + 2 * i)
                .take_while(move |&x| x <= self.x_hi)
                .map(move |x| LatticePoint::new(x, t))
        })
    }
}

/// A killing mark that survived the age filter.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct AgedKillPoint {
    pub site: LatticePoint,
    pub age: Age,
}

/// All killing marks in the box whose age is at least `eps_steps`, probing
/// each mark's wedge to `max_depth`. The age is measured against the
/// killing-free system, so in joint mode the field must have kill resampling.
pub fn aged_kill_points(
    field: &ArrowField,
    bounds: &LatticeBox,
    eps_steps: u64,
    max_depth: u64,
) -> Vec<AgedKillPoint> {
    assert!(
        max_depth >= eps_steps,
        "probe depth {max_depth} cannot certify age >= {eps_steps}"
    );
    let mut out = Vec::new();
    for site in bounds.forward_sites() {
        if !field.is_killing_at(site) {
            continue;
        }
        let age = age_at(field, site.x, site.t, max_depth);
        if age.at_least(eps_steps) {
            out.push(AgedKillPoint { site, age });
        }
    }
    out
}
