//! Replicated Monte Carlo experiments. Each estimator runs `reps` independent
//! replicates of a lattice experiment at diffusive scaling, reduces them in
//! replicate order (so thread count never changes results), and returns a
//! point estimate with its standard error plus the analytic reference value
//! when one exists.
//!
//! Scaling conventions: a macroscopic length L corresponds to L·e^β lattice
//! units rounded to the nearest even integer (windows keep their parity
//! alignment), and a macroscopic duration t to ⌈t·e^{2β}⌉ steps, at least 1.
//! Site parameters are b_site = b·e^{−β} and k_site = k·e^{−2β}. Every
//! estimate's `notes` field records the lattice values actually used.

use crate::analytic::{expected_aged_kill_count, xi_density};
use crate::dual::membership;
use crate::field::{ArrowField, FieldParams, Kind, Mode};
use crate::lattice::{LatticePoint, Window};
use crate::rng::{derive_seed, domain, site_uniform, STREAM_INIT};
use crate::stats::{geometric_gap_gof, mean_and_se, Gof};
use crate::walkers::{bc_point_set, step_point_set, Boundary, Exactness, Killing, PointSet};
use std::fmt;

/// Point estimate from replicated simulation.
#[derive(Clone, PartialEq, Debug)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub replicates: usize,
    /// Analytic target when the quantity has one; None for trend-only
    /// quantities.
    pub reference: Option<f64>,
    /// Human-readable record of the lattice geometry actually simulated and
    /// any degradations applied.
    pub notes: String,
}

/// A configuration error: parameters that violate a precondition rather than
/// a simulation that failed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Oriented-site-percolation threshold on the square lattice. External
/// literature value, used purely as a comparison line for block-crossing
/// probabilities; nothing in this crate derives it.
pub const ORIENTED_SITE_PERCOLATION_THRESHOLD: f64 = 0.7055;

/// Widest simulation row (in occupiable sites) an exact-buffer run may
/// allocate before it is rejected or degraded.
const MAX_WINDOW_SITES: i64 = 4_000_000;

/// Macroscopic model parameters plus the scaling exponent and run plumbing.
#[derive(Clone, Copy, Debug)]
pub struct ScaledConfig {
    pub mode: Mode,
    /// Macroscopic branching strength; per-site probability is b·e^{−β}.
    pub b: f64,
    /// Macroscopic killing strength; per-site probability is k·e^{−2β}.
    pub k: f64,
    pub beta: f64,
    pub seed: u64,
    pub threads: usize,
}

impl ScaledConfig {
    pub fn b_site(&self) -> f64 {
        self.b * (-self.beta).exp()
    }

    pub fn k_site(&self) -> f64 {
        self.k * (-2.0 * self.beta).exp()
    }

    /// Macroscopic length → lattice units, nearest even integer (windows stay
    /// symmetric with respect to site parity).
    pub fn round_len(&self, macro_len: f64) -> i64 {
        2 * ((macro_len * self.beta.exp()) / 2.0).round() as i64
    }

    /// Macroscopic duration → lattice steps, rounded up and at least 1 so a
    /// positive duration never degenerates to a no-op.
    pub fn round_time(&self, macro_t: f64) -> i64 {
        assert!(macro_t >= 0.0, "negative duration {macro_t}");
        (macro_t * (2.0 * self.beta).exp()).ceil().max(1.0) as i64
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.beta < 0.0 {
            return Err(ConfigError(format!("beta = {} must be >= 0", self.beta)));
        }
        if self.threads == 0 {
            return Err(ConfigError("threads must be >= 1".into()));
        }
        let params = FieldParams {
            mode: self.mode,
            b: self.b_site(),
            k: self.k_site(),
            seed: self.seed,
        };
        params.validate().map_err(ConfigError)
    }

    /// The environment for replicate `r`: one seed per replicate, derived so
    /// that sweeps varying k (or b) at fixed seed reuse the same underlying
    /// uniforms for exact coupling.
    pub fn replicate_field(&self, r: usize) -> ArrowField {
        let seed = derive_seed(self.seed, r as u64, domain::REPLICATE);
        ArrowField::with_kill_resampling(FieldParams {
            mode: self.mode,
            b: self.b_site(),
            k: self.k_site(),
            seed,
        })
    }
}

/// Run `reps` independent jobs across `threads` OS threads and return results
/// indexed by replicate. Each replicate's result lands in its own slot, so
/// the reduction order — and therefore every downstream statistic — is
/// independent of the thread count.
pub fn run_replicates<T, F>(reps: usize, threads: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    assert!(reps >= 1, "need at least one replicate");
    let threads = threads.max(1).min(reps);
    if threads == 1 {
        return (0..reps).map(job).collect();
    }
    let mut slots: Vec<Option<T>> = Vec::with_capacity(reps);
    slots.resize_with(reps, || None);
    let chunk = reps.div_ceil(threads);
    std::thread::scope(|scope| {
        for (ti, slice) in slots.chunks_mut(chunk).enumerate() {
            let job = &job;
            scope.spawn(move || {
                for (off, slot) in slice.iter_mut().enumerate() {
                    *slot = Some(job(ti * chunk + off));
                }
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("every replicate slot filled"))
        .collect()
}

fn summarize(values: &[f64], reference: Option<f64>, notes: String) -> Estimate {
    let (mean, std_error) = mean_and_se(values);
    Estimate {
        mean,
        std_error,
        replicates: values.len(),
        reference,
        notes,
    }
}

/// Occupied positions of `ps` inside [lo, hi], as a subslice.
fn core_slice<'a>(ps: &'a PointSet, lo: i64, hi: i64) -> &'a [i64] {
    let v = ps.positions();
    let a = v.partition_point(|&x| x < lo);
    let b = v.partition_point(|&x| x <= hi);
    &v[a..b]
}

fn window_site_budget(half_width: i64) -> Result<(), ConfigError> {
    if half_width + 1 > MAX_WINDOW_SITES {
        return Err(ConfigError(format!(
            "exact-buffer window needs {} sites per row (budget {}); \
             use a smaller beta or shorter horizon",
            half_width + 1,
            MAX_WINDOW_SITES
        )));
    }
    Ok(())
}

/// Mean number of net points in the macroscopic window [−L, L] at
/// macroscopic time t, started from the full line at time 0, killing
/// ignored. The window count over length 2L estimates 2L times the local
/// density, so the reference is 2L·xi_density(b, t). Exact buffers: the
/// simulated strip is wider than the window by the full horizon.
pub fn estimate_density(
    cfg: &ScaledConfig,
    t_macro: f64,
    l_macro: f64,
    reps: usize,
) -> Result<Estimate, ConfigError> {
    cfg.validate()?;
    if t_macro < 0.0 || l_macro <= 0.0 {
        return Err(ConfigError(format!(
            "need t >= 0 and L > 0; got t = {t_macro}, L = {l_macro}"
        )));
    }
    let l_lat = cfg.round_len(l_macro);
    if t_macro == 0.0 {
        // no evolution: the full line restricted to the window, a constant
        let count = PointSet::full_line(0, -l_lat, l_lat).len() as f64;
        return Ok(Estimate {
            mean: count,
            std_error: 0.0,
            replicates: reps,
            reference: None,
            notes: format!("degenerate t=0 full-line count; lattice L={l_lat}"),
        });
    }
    let t_lat = cfg.round_time(t_macro);
    let window = Window::new(-l_lat, l_lat, t_lat);
    window_site_budget(window.sim_hi())?;
    let counts = run_replicates(reps, cfg.threads, |r| {
        let field = cfg.replicate_field(r);
        let mut ps = PointSet::full_line(0, window.sim_lo(), window.sim_hi());
        for step in 0..t_lat {
            let (next, tag) = bc_point_set(&field, &ps, Killing::Off, &window, t_lat - step);
            debug_assert_eq!(tag, Exactness::Exact);
            ps = next;
        }
        core_slice(&ps, -l_lat, l_lat).len() as f64
    });
    let reference = 2.0 * l_macro * xi_density(cfg.b, t_macro);
    Ok(summarize(
        &counts,
        Some(reference),
        format!("lattice t={t_lat}, L={l_lat}, buffer={t_lat}"),
    ))
}

/// Axis-aligned macroscopic space-time rectangle.
#[derive(Clone, Copy, Debug)]
pub struct MacroBox {
    pub x_lo: f64,
    pub x_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl MacroBox {
    pub fn unit() -> Self {
        Self {
            x_lo: 0.0,
            x_hi: 1.0,
            t_lo: 0.0,
            t_hi: 1.0,
        }
    }

    pub fn area(&self) -> f64 {
        (self.x_hi - self.x_lo) * (self.t_hi - self.t_lo)
    }
}

/// Mean number of killing marks inside the box whose age — how far back the
/// full-line start can be pushed with the mark's site still reachable,
/// killing ignored — is at least eps_macro. Age is decided by the dual wedge
/// walls (an O(age-bound) walk per mark), never by forward simulation.
/// Reference: k · area · density of the killing-free system at time eps.
pub fn estimate_kill_intensity(
    cfg: &ScaledConfig,
    bounds: &MacroBox,
    eps_macro: f64,
    reps: usize,
) -> Result<Estimate, ConfigError> {
    cfg.validate()?;
    if eps_macro <= 0.0 {
        return Err(ConfigError(format!(
            "age threshold must be positive; got eps = {eps_macro}"
        )));
    }
    if bounds.x_lo >= bounds.x_hi || bounds.t_lo >= bounds.t_hi {
        return Err(ConfigError("empty box".into()));
    }
    let x_lo = cfg.round_len(bounds.x_lo);
    let x_hi = cfg.round_len(bounds.x_hi);
    let time_unit = (2.0 * cfg.beta).exp();
    let t_lo = (bounds.t_lo * time_unit).ceil() as i64;
    let t_hi = (bounds.t_hi * time_unit).ceil() as i64;
    let eps_steps = cfg.round_time(eps_macro);
    let counts = run_replicates(reps, cfg.threads, |r| {
        let field = cfg.replicate_field(r);
        let mut qualifying = 0u64;
        for t in t_lo..=t_hi {
            let start = if (x_lo + t) & 1 == 0 { x_lo } else { x_lo + 1 };
            let mut x = start;
            while x <= x_hi {
                let site = LatticePoint::new(x, t);
                if field.is_killing_at(site) && membership(&field, x, t, t - eps_steps) {
                    qualifying += 1;
                }
                x += 2;
            }
        }
        qualifying as f64
    });
    let reference = expected_aged_kill_count(cfg.k, bounds.area(), cfg.b, eps_macro);
    Ok(summarize(
        &counts,
        Some(reference),
        format!("lattice box x=[{x_lo},{x_hi}] t=[{t_lo},{t_hi}], age >= {eps_steps} steps"),
    ))
}

/// Distribution summary of the first-mark-hit time of the windowed net.
#[derive(Clone, Debug)]
pub struct ThetaSummary {
    /// Mean of the (cap-censored) hitting time in macroscopic units.
    pub estimate: Estimate,
    /// Per-replicate macroscopic samples, censored values equal to the cap.
    pub samples: Vec<f64>,
    /// Among replicates that hit, fraction where exactly one occupied site
    /// carried a mark at the hitting time. NaN when nothing hit.
    pub uniqueness_fraction: f64,
    pub censored_fraction: f64,
}

fn theta_lattice_run(
    field: &ArrowField,
    window: &Window,
    horizon: i64,
) -> (Option<i64>, bool) {
    // killing-free net from the full line; marks are read, never acted on
    let mut ps = PointSet::full_line(0, window.sim_lo(), window.sim_hi());
    for step in 0..horizon {
        let (next, tag) = bc_point_set(field, &ps, Killing::Off, window, horizon - step);
        debug_assert_eq!(tag, Exactness::Exact);
        ps = next;
        let mut marked = 0usize;
        for &x in core_slice(&ps, window.x_lo, window.x_hi) {
            if field.is_killing_at(LatticePoint::new(x, ps.time)) {
                marked += 1;
                if marked > 1 {
                    break;
                }
            }
        }
        if marked > 0 {
            return (Some(ps.time), marked == 1);
        }
    }
    (None, false)
}

/// First macroscopic time at which the killing-free net, started from the
/// full line, has a point inside [−L, L] sitting on a killing mark; censored
/// at T_cap. Runs with exact buffers; when the full-line strip would exceed
/// the row budget and beta > 4, the run degrades to beta = 4 with a warning
/// in the notes instead of silently truncating the start.
pub fn estimate_theta(
    cfg: &ScaledConfig,
    l_macro: f64,
    t_cap_macro: f64,
    reps: usize,
) -> Result<ThetaSummary, ConfigError> {
    cfg.validate()?;
    if l_macro <= 0.0 || t_cap_macro <= 0.0 {
        return Err(ConfigError(format!(
            "need L > 0 and T_cap > 0; got L = {l_macro}, T_cap = {t_cap_macro}"
        )));
    }
    let mut cfg = *cfg;
    let mut degraded = false;
    let (window, horizon) = loop {
        let l_lat = cfg.round_len(l_macro);
        let horizon = cfg.round_time(t_cap_macro);
        let window = Window::new(-l_lat, l_lat, horizon);
        match window_site_budget(window.sim_hi()) {
            Ok(()) => break (window, horizon),
            Err(e) => {
                if cfg.beta > 4.0 {
                    cfg.beta = 4.0;
                    degraded = true;
                } else {
                    return Err(e);
                }
            }
        }
    };
    let time_unit = (2.0 * cfg.beta).exp();
    let results = run_replicates(reps, cfg.threads, |r| {
        let field = cfg.replicate_field(r);
        theta_lattice_run(&field, &window, horizon)
    });
    let samples: Vec<f64> = results
        .iter()
        .map(|(hit, _)| match hit {
            Some(t) => *t as f64 / time_unit,
            None => t_cap_macro,
        })
        .collect();
    let hits = results.iter().filter(|(h, _)| h.is_some()).count();
    let unique = results
        .iter()
        .filter(|(h, u)| h.is_some() && *u)
        .count();
    let censored_fraction = (reps - hits) as f64 / reps as f64;
    let uniqueness_fraction = if hits > 0 {
        unique as f64 / hits as f64
    } else {
        f64::NAN
    };
    let mut notes = format!(
        "lattice L={}, cap={horizon} steps; censored {:.3}",
        window.x_hi, censored_fraction
    );
    if degraded {
        notes = format!("degraded to beta=4 (full-line strip over budget); {notes}");
    }
    Ok(ThetaSummary {
        estimate: summarize(&samples, None, notes),
        samples,
        uniqueness_fraction,
        censored_fraction,
    })
}

/// Renewal structure over a macroscopic span.
#[derive(Clone, Debug)]
pub struct GapSummary {
    /// Mean of the per-replicate maximum inter-renewal gap (macroscopic).
    pub estimate: Estimate,
    pub per_replicate_max: Vec<f64>,
    /// Complete (uncensored) gaps of each replicate in renewal order.
    pub per_replicate_gaps: Vec<Vec<f64>>,
}

/// Renewal chain of first-mark-hit times over the span [−T0, T0]: after each
/// hit the net restarts from the full line at the hitting row, so successive
/// gaps are distributed as independent copies of the single-hit time. The
/// final, censored gap (from the last renewal to the end of the span) counts
/// toward the maximum but is excluded from the gap samples.
pub fn estimate_renewal_gaps(
    cfg: &ScaledConfig,
    l0_macro: f64,
    t0_macro: f64,
    reps: usize,
) -> Result<GapSummary, ConfigError> {
    cfg.validate()?;
    if l0_macro <= 0.0 || t0_macro <= 0.0 {
        return Err(ConfigError(format!(
            "need L0 > 0 and T0 > 0; got L0 = {l0_macro}, T0 = {t0_macro}"
        )));
    }
    let mut cfg = *cfg;
    let mut degraded = false;
    let (window, span) = loop {
        let l_lat = cfg.round_len(l0_macro);
        let span = 2 * cfg.round_time(t0_macro);
        let window = Window::new(-l_lat, l_lat, span);
        match window_site_budget(window.sim_hi()) {
            Ok(()) => break (window, span),
            Err(e) => {
                if cfg.beta > 4.0 {
                    cfg.beta = 4.0;
                    degraded = true;
                } else {
                    return Err(e);
                }
            }
        }
    };
    let time_unit = (2.0 * cfg.beta).exp();
    let results = run_replicates(reps, cfg.threads, |r| {
        let field = cfg.replicate_field(r);
        let mut renewal_row = 0i64;
        let mut gaps: Vec<f64> = Vec::new();
        let mut max_gap = 0.0f64;
        while renewal_row < span {
            let mut ps = PointSet::full_line(renewal_row, window.sim_lo(), window.sim_hi());
            let mut hit: Option<i64> = None;
            while ps.time < span {
                let (next, tag) =
                    bc_point_set(&field, &ps, Killing::Off, &window, span - ps.time);
                debug_assert_eq!(tag, Exactness::Exact);
                ps = next;
                let marked = core_slice(&ps, window.x_lo, window.x_hi)
                    .iter()
                    .any(|&x| field.is_killing_at(LatticePoint::new(x, ps.time)));
                if marked {
                    hit = Some(ps.time);
                    break;
                }
            }
            match hit {
                Some(row) => {
                    let gap = (row - renewal_row) as f64 / time_unit;
                    gaps.push(gap);
                    max_gap = max_gap.max(gap);
                    renewal_row = row;
                }
                None => {
                    let censored = (span - renewal_row) as f64 / time_unit;
                    max_gap = max_gap.max(censored);
                    break;
                }
            }
        }
        (max_gap, gaps)
    });
    let per_replicate_max: Vec<f64> = results.iter().map(|(m, _)| *m).collect();
    let per_replicate_gaps: Vec<Vec<f64>> = results.into_iter().map(|(_, g)| g).collect();
    let mut notes = format!("lattice L0={}, span={span} steps", window.x_hi);
    if degraded {
        notes = format!("degraded to beta=4 (full-line strip over budget); {notes}");
    }
    Ok(GapSummary {
        estimate: summarize(&per_replicate_max, None, notes),
        per_replicate_max,
        per_replicate_gaps,
    })
}

/// Small-gap statistics of the net at its first mark-hit time.
#[derive(Clone, Debug)]
pub struct SparsenessSummary {
    /// P(min gap < eps) per requested eps, in macroscopic units.
    pub p_small: Vec<(f64, Estimate)>,
    /// Per-replicate rescaled minimum gap; +inf when fewer than two points
    /// survive in the window (no pair exists).
    pub min_gap_samples: Vec<f64>,
    /// Replicates whose hit time ran past the internal cap (counted as +inf
    /// gaps; should be rare for k > 0).
    pub censored: usize,
}

/// Minimum rescaled gap of the windowed killing-free net at the first time it
/// touches a killing mark. Requires k > 0 — without marks the hitting time
/// never happens and the quantity is undefined.
pub fn estimate_sparseness(
    cfg: &ScaledConfig,
    l_macro: f64,
    eps_grid: &[f64],
    reps: usize,
) -> Result<SparsenessSummary, ConfigError> {
    cfg.validate()?;
    if cfg.k <= 0.0 {
        return Err(ConfigError(
            "sparseness is measured at the first mark-hit time, undefined for k = 0".into(),
        ));
    }
    if l_macro <= 0.0 {
        return Err(ConfigError(format!("need L > 0; got L = {l_macro}")));
    }
    // generous internal cap: hit times here concentrate well below 1/L^2
    let t_cap_macro = (8.0 / (l_macro * l_macro)).max(1.0);
    let l_lat = cfg.round_len(l_macro);
    let horizon = cfg.round_time(t_cap_macro);
    let window = Window::new(-l_lat, l_lat, horizon);
    window_site_budget(window.sim_hi())?;
    let len_unit = cfg.beta.exp();
    let results = run_replicates(reps, cfg.threads, |r| {
        let field = cfg.replicate_field(r);
        let mut ps = PointSet::full_line(0, window.sim_lo(), window.sim_hi());
        for step in 0..horizon {
            let (next, tag) = bc_point_set(&field, &ps, Killing::Off, &window, horizon - step);
            debug_assert_eq!(tag, Exactness::Exact);
            ps = next;
            let core = core_slice(&ps, -l_lat, l_lat);
            let hit = core
                .iter()
                .any(|&x| field.is_killing_at(LatticePoint::new(x, ps.time)));
            if hit {
                let min_gap = core
                    .windows(2)
                    .map(|w| w[1] - w[0])
                    .min()
                    .map(|g| g as f64 / len_unit)
                    .unwrap_or(f64::INFINITY);
                return (min_gap, false);
            }
        }
        (f64::INFINITY, true)
    });
    let min_gap_samples: Vec<f64> = results.iter().map(|(g, _)| *g).collect();
    let censored = results.iter().filter(|(_, c)| *c).count();
    let p_small = eps_grid
        .iter()
        .map(|&eps| {
            let indicators: Vec<f64> = min_gap_samples
                .iter()
                .map(|&g| if g < eps { 1.0 } else { 0.0 })
                .collect();
            let notes = format!(
                "lattice L={l_lat}, cap={horizon} steps, parity floor {}",
                2.0 / len_unit
            );
            (eps, summarize(&indicators, None, notes))
        })
        .collect();
    Ok(SparsenessSummary {
        p_small,
        min_gap_samples,
        censored,
    })
}

/// Survival probability of the net grown from a single origin particle,
/// killing on, at macroscopic horizon T, for each killing strength in
/// `k_grid`. All strengths share each replicate's environment through the
/// kill-threshold coupling, so every replicate's survival indicator is
/// non-increasing along the grid — exactly, and this is asserted.
pub fn survival_curve(
    cfg_base: &ScaledConfig,
    k_grid: &[f64],
    t_macro: f64,
    reps: usize,
) -> Result<Vec<Estimate>, ConfigError> {
    if k_grid.is_empty() {
        return Err(ConfigError("empty k grid".into()));
    }
    if k_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(ConfigError("k grid must be sorted ascending".into()));
    }
    let configs: Vec<ScaledConfig> = k_grid
        .iter()
        .map(|&k| ScaledConfig { k, ..*cfg_base })
        .collect();
    for c in &configs {
        c.validate()?;
    }
    let horizon = cfg_base.round_time(t_macro);
    let rows = run_replicates(reps, cfg_base.threads, |r| {
        let mut row = Vec::with_capacity(configs.len());
        for c in &configs {
            let field = c.replicate_field(r);
            let mut ps = PointSet::new(0, vec![0]);
            let mut step = 0;
            while step < horizon && !ps.is_empty() {
                ps = step_point_set(&field, &ps, Killing::On, Boundary::Unbounded);
                step += 1;
            }
            row.push(if ps.is_empty() { 0.0 } else { 1.0 });
        }
        // the coupling makes survival monotone per replicate, not just on
        // average — verify, don't assume
        assert!(
            row.windows(2).all(|w| w[0] >= w[1]),
            "survival indicator increased along the k grid: {row:?}"
        );
        row
    });
    Ok((0..k_grid.len())
        .map(|i| {
            let vals: Vec<f64> = rows.iter().map(|row| row[i]).collect();
            summarize(
                &vals,
                None,
                format!("k={}, lattice horizon={horizon}", k_grid[i]),
            )
        })
        .collect())
}

/// Mean size of the net grown from one origin particle after one macroscopic
/// time unit, killing on. Counted over the whole light cone — no window, no
/// truncation error. Values below 1 certify subcritical branching of the
/// induced generation process.
pub fn offspring_mean(cfg: &ScaledConfig, reps: usize) -> Result<Estimate, ConfigError> {
    cfg.validate()?;
    let horizon = cfg.round_time(1.0);
    let counts = run_replicates(reps, cfg.threads, |r| {
        let field = cfg.replicate_field(r);
        let mut ps = PointSet::new(0, vec![0]);
        let mut step = 0;
        while step < horizon && !ps.is_empty() {
            ps = step_point_set(&field, &ps, Killing::On, Boundary::Unbounded);
            step += 1;
        }
        ps.len() as f64
    });
    Ok(summarize(
        &counts,
        None,
        format!("lattice horizon={horizon}, unbounded"),
    ))
}

/// Stationarity diagnostics for the product-Bernoulli initial law.
#[derive(Clone, Debug)]
pub struct StationarityReport {
    /// Core-window intensity minus the stationary value a = 4b/(1+b)²;
    /// reference 0.
    pub intensity_drift: Estimate,
    /// Probability both of a site and its distance-2 neighbour are occupied;
    /// reference a².
    pub pair_correlation: Estimate,
    /// Chi-square fit of inter-particle gaps against Geometric(a), pooled
    /// over replicates.
    pub gap_gof: Gof,
    pub stationary_intensity: f64,
}

/// Start from an independent Bernoulli(a) configuration with the stationary
/// intensity a = 4b/(1+b)², evolve the killing-free system an even number of
/// steps, and test that intensity, distance-2 pair correlation, and the gap
/// law are unchanged. `b_site` is the raw per-site branching probability (no
/// diffusive scaling here).
pub fn bernoulli_stationarity(
    b_site: f64,
    steps: i64,
    window: &Window,
    reps: usize,
    seed: u64,
    threads: usize,
) -> Result<StationarityReport, ConfigError> {
    if !(0.0..=1.0).contains(&b_site) {
        return Err(ConfigError(format!("b_site = {b_site} outside [0,1]")));
    }
    if steps < 0 || steps % 2 != 0 {
        return Err(ConfigError(format!(
            "steps = {steps} must be even: the evolved law matches the initial \
             one only modulo the two-step parity shift"
        )));
    }
    if window.buffer < steps {
        return Err(ConfigError(format!(
            "window buffer {} shorter than the horizon {steps}; core would \
             feel the boundary",
            window.buffer
        )));
    }
    let a = 4.0 * b_site / ((1.0 + b_site) * (1.0 + b_site));
    let results = run_replicates(reps, threads, |r| {
        let rep_seed = derive_seed(seed, r as u64, domain::REPLICATE);
        let field = ArrowField::new(FieldParams {
            mode: Mode::Layered,
            b: b_site,
            k: 0.0,
            seed: rep_seed,
        });
        // independent Bernoulli(a) occupancy on the even row 0
        let mut init = Vec::new();
        let mut x = if (window.sim_lo()) % 2 == 0 {
            window.sim_lo()
        } else {
            window.sim_lo() + 1
        };
        while x <= window.sim_hi() {
            if site_uniform(rep_seed, x, 0, STREAM_INIT) < a {
                init.push(x);
            }
            x += 2;
        }
        let mut ps = PointSet::new(0, init);
        for _ in 0..steps {
            ps = step_point_set(
                &field,
                &ps,
                Killing::Off,
                Boundary::Absorb(window.sim_lo(), window.sim_hi()),
            );
        }
        let core = core_slice(&ps, window.x_lo, window.x_hi);
        // core site count on the final row's parity
        let first = if (window.x_lo + ps.time) & 1 == 0 {
            window.x_lo
        } else {
            window.x_lo + 1
        };
        let n_sites = ((window.x_hi - first) / 2 + 1).max(0) as f64;
        let intensity = core.len() as f64 / n_sites;
        let mut pair_hits = 0usize;
        for w in core.windows(2) {
            if w[1] - w[0] == 2 {
                pair_hits += 1;
            }
        }
        let pair_corr = pair_hits as f64 / (n_sites - 1.0);
        let gaps: Vec<u64> = core
            .windows(2)
            .map(|w| ((w[1] - w[0]) / 2) as u64)
            .collect();
        (intensity - a, pair_corr, gaps)
    });
    let drifts: Vec<f64> = results.iter().map(|(d, _, _)| *d).collect();
    let pairs: Vec<f64> = results.iter().map(|(_, p, _)| *p).collect();
    let mut pooled_gaps: Vec<u64> = Vec::new();
    for (_, _, g) in &results {
        pooled_gaps.extend_from_slice(g);
    }
    let gap_gof = if pooled_gaps.is_empty() || a >= 1.0 {
        // saturated or empty field has no gap law to test
        Gof {
            statistic: 0.0,
            critical_95: f64::INFINITY,
            dof: 1,
        }
    } else {
        geometric_gap_gof(&pooled_gaps, a)
    };
    let notes = format!("a={a:.6}, steps={steps}, core=[{},{}]", window.x_lo, window.x_hi);
    Ok(StationarityReport {
        intensity_drift: summarize(&drifts, Some(0.0), notes.clone()),
        pair_correlation: summarize(&pairs, Some(a * a), notes),
        gap_gof,
        stationary_intensity: a,
    })
}

/// Outcome of the label-domination audit.
#[derive(Clone, Debug)]
pub struct DominationReport {
    pub holds: bool,
    /// First violation, if any: (replicate, step, site).
    pub violation: Option<(usize, i64, LatticePoint)>,
    pub replicates: usize,
    pub steps: i64,
}

/// Evolve one net per start under its own independent environment, plus the
/// joint net started from all starts under the minimum-label rule: a joint
/// particle follows the environment of the lowest-numbered single net
/// currently occupying its site. Asserts, site by site and step by step, that
/// the joint net stays inside the union of the single nets.
pub fn domination_check(
    cfg: &ScaledConfig,
    starts: &[LatticePoint],
    horizon: i64,
    reps: usize,
) -> Result<DominationReport, ConfigError> {
    cfg.validate()?;
    if starts.is_empty() {
        return Err(ConfigError("no start points".into()));
    }
    let t0 = starts[0].t;
    for (i, s) in starts.iter().enumerate() {
        if !s.is_forward() {
            return Err(ConfigError(format!("start {s} is off the even sublattice")));
        }
        if s.t != t0 {
            return Err(ConfigError("starts must share one time row".into()));
        }
        if starts[..i].contains(s) {
            return Err(ConfigError(format!("duplicate start {s}")));
        }
    }
    let violations = run_replicates(reps, cfg.threads, |r| -> Option<(i64, LatticePoint)> {
        let rep_seed = derive_seed(cfg.seed, r as u64, domain::REPLICATE);
        let fields: Vec<ArrowField> = (0..starts.len())
            .map(|i| {
                ArrowField::with_kill_resampling(FieldParams {
                    mode: cfg.mode,
                    b: cfg.b_site(),
                    k: cfg.k_site(),
                    seed: derive_seed(rep_seed, i as u64, domain::LABEL),
                })
            })
            .collect();
        let mut singles: Vec<PointSet> = starts
            .iter()
            .map(|s| PointSet::new(t0, vec![s.x]))
            .collect();
        let mut joint = PointSet::new(t0, starts.iter().map(|s| s.x).collect());
        for step in 0..horizon {
            let t = t0 + step;
            // joint step under the min-label rule
            let mut next: Vec<i64> = Vec::new();
            for &x in joint.positions() {
                let label = (0..singles.len()).find(|&i| singles[i].contains(x));
                let Some(label) = label else {
                    return Some((t, LatticePoint::new(x, t)));
                };
                let site = LatticePoint::new(x, t);
                let outcome = fields[label].outcome_at(site);
                if outcome.kind == Kind::Kill || outcome.kill_mark {
                    continue;
                }
                match outcome.kind {
                    Kind::Both => {
                        next.push(x - 1);
                        next.push(x + 1);
                    }
                    Kind::LeftOnly => next.push(x - 1),
                    Kind::RightOnly => next.push(x + 1),
                    Kind::Kill => unreachable!(),
                }
            }
            next.sort_unstable();
            next.dedup();
            joint = PointSet::new(t + 1, next);
            for (i, s) in singles.iter_mut().enumerate() {
                *s = step_point_set(&fields[i], s, Killing::On, Boundary::Unbounded);
            }
            for &x in joint.positions() {
                if !singles.iter().any(|s| s.contains(x)) {
                    return Some((t + 1, LatticePoint::new(x, t + 1)));
                }
            }
        }
        None
    });
    let violation = violations
        .iter()
        .enumerate()
        .find_map(|(r, v)| v.map(|(t, p)| (r, t, p)));
    Ok(DominationReport {
        holds: violation.is_none(),
        violation,
        replicates: reps,
        steps: horizon,
    })
}

/// For each macroscopic start offset v, the probability that the net grown
/// from v (killing on, confined to the box [−3m, 3m] × [0, n]) occupies both
/// the left landing zone [−3m, −m] and the right one [m, 3m] at the top row.
/// Probabilities above [`ORIENTED_SITE_PERCOLATION_THRESHOLD`] for every
/// start in [−2m, 2m] make the box pattern dominate a supercritical oriented
/// percolation.
pub fn block_crossing(
    cfg: &ScaledConfig,
    m_macro: f64,
    n_macro: f64,
    v_offsets: &[f64],
    reps: usize,
) -> Result<Vec<Estimate>, ConfigError> {
    cfg.validate()?;
    if m_macro <= 0.0 || n_macro <= 0.0 {
        return Err(ConfigError(format!(
            "need m > 0 and n > 0; got m = {m_macro}, n = {n_macro}"
        )));
    }
    if v_offsets.is_empty() {
        return Err(ConfigError("no start offsets".into()));
    }
    let m_lat = cfg.round_len(m_macro).max(2);
    let n_lat = cfg.round_time(n_macro);
    let starts: Vec<i64> = v_offsets
        .iter()
        .map(|&v| {
            let mut x = cfg.round_len(v);
            if (x + 0) & 1 != 0 {
                x += 1;
            }
            x.clamp(-2 * m_lat, 2 * m_lat)
        })
        .collect();
    let rows = run_replicates(reps, cfg.threads, |r| {
        let field = cfg.replicate_field(r);
        starts
            .iter()
            .map(|&v| {
                let mut ps = PointSet::new(0, vec![v]);
                let mut step = 0;
                while step < n_lat && !ps.is_empty() {
                    ps = step_point_set(
                        &field,
                        &ps,
                        Killing::On,
                        Boundary::Absorb(-3 * m_lat, 3 * m_lat),
                    );
                    step += 1;
                }
                let left = !core_slice(&ps, -3 * m_lat, -m_lat).is_empty();
                let right = !core_slice(&ps, m_lat, 3 * m_lat).is_empty();
                if left && right {
                    1.0
                } else {
                    0.0
                }
            })
            .collect::<Vec<f64>>()
    });
    Ok((0..starts.len())
        .map(|i| {
            let vals: Vec<f64> = rows.iter().map(|row| row[i]).collect();
            summarize(
                &vals,
                None,
                format!(
                    "start v={}, lattice m={m_lat}, n={n_lat}; external comparison \
                     threshold {ORIENTED_SITE_PERCOLATION_THRESHOLD}",
                    starts[i]
                ),
            )
        })
        .collect())
}
