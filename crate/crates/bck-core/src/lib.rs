//! Simulator and statistical verification harness for one-dimensional
//! branching-coalescing-killing (BCK) random walks on the even space-time
//! lattice, together with the dual-web/wedge machinery, exact hitting-time
//! oracles, and replicated Monte Carlo estimators.
//!
//! The model: each even site (x,t) independently carries two outgoing arrows
//! with probability `b` (branch point), no arrow with probability `k` (killing
//! point), and otherwise a single arrow to a uniformly chosen neighbour.
//! Walkers follow arrows, coalesce when they meet, and die at killing points.
//! Under the diffusive scaling x ↦ x·e^{−β}, t ↦ t·e^{−2β} with b_site = b·e^{−β}
//! and k_site = k·e^{−2β}, the system approximates the Brownian net with
//! killing; every estimator in [`estimators`] targets a quantity of that limit
//! that is checkable at desk scale.

pub mod analytic;
pub mod dual;
pub mod estimators;
pub mod field;
pub mod lattice;
pub mod rng;
pub mod stats;
pub mod walkers;

pub use dual::{age_at, aged_kill_points, membership, trace_dual, wedge_walk};
pub use dual::{Age, AgedKillPoint, LatticeBox, WedgeWalk};
pub use estimators::{Estimate, ScaledConfig};
pub use field::{ArrowField, Dir, FieldParams, Kind, Mode, SiteOutcome, Web};
pub use lattice::{rescale, LatticePoint, Window};
pub use walkers::{bc_point_set, step_point_set, trace_path};
pub use walkers::{Boundary, Exactness, HopRule, Killing, PathTrace, PointSet, Termination};
