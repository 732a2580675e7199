//! Command-line front end: one subcommand per estimator plus an environment
//! self-test, with reproducible seeding and machine-readable output.
//!
//! Exit codes: 0 success, 1 runtime failure (infeasible run, self-test
//! discrepancy, domination violation), 2 usage or configuration error.
//! Data goes to stdout (or --out); diagnostics only ever go to stderr.

use bck_core::estimators::{
    bernoulli_stationarity, block_crossing, domination_check, estimate_density,
    estimate_kill_intensity, estimate_renewal_gaps, estimate_sparseness, estimate_theta,
    offspring_mean, survival_curve, ConfigError, Estimate, MacroBox, ScaledConfig,
};
use bck_core::rng::{derive_seed, domain};
use bck_core::stats::quantile;
use bck_core::{
    membership, trace_path, ArrowField, Dir, FieldParams, HopRule, Killing, Kind, LatticePoint,
    Mode, Web, Window,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "bck",
    about = "Simulate branching-coalescing-killing random walks and check them \
             against their scaling-limit formulas",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean point count of the killing-free net in a window, vs. the density formula
    Density(Opts),
    /// Mean count of killing marks older than --eps in a space-time box
    KillIntensity(Opts),
    /// First time the windowed net touches a killing mark (--t is the censoring cap)
    Theta(Opts),
    /// Renewal chain of mark-hit times over [-T0, T0]; reports the largest gap
    Renewal(Opts),
    /// Minimum point gap of the windowed net at its first mark-hit time
    Sparseness(Opts),
    /// Survival probability of the net from one particle, per killing strength in --k
    Survival(Opts),
    /// Mean particle count of the net from one particle after one time unit
    Offspring(Opts),
    /// Drift and gap-law tests of the stationary Bernoulli profile (needs k = 0)
    Stationarity(Opts),
    /// Min-label coupling audit: joint net stays inside the union of single nets
    Domination(Opts),
    /// Probability of crossing a box into both landing zones, per start offset
    Blocks(Opts),
    /// Exhaustive dual-vs-forward equivalence check on small stored lattices
    OracleCheck(Opts),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Density(_) => "density",
            Command::KillIntensity(_) => "kill-intensity",
            Command::Theta(_) => "theta",
            Command::Renewal(_) => "renewal",
            Command::Sparseness(_) => "sparseness",
            Command::Survival(_) => "survival",
            Command::Offspring(_) => "offspring",
            Command::Stationarity(_) => "stationarity",
            Command::Domination(_) => "domination",
            Command::Blocks(_) => "blocks",
            Command::OracleCheck(_) => "oracle-check",
        }
    }

    fn opts(&self) -> &Opts {
        match self {
            Command::Density(o)
            | Command::KillIntensity(o)
            | Command::Theta(o)
            | Command::Renewal(o)
            | Command::Sparseness(o)
            | Command::Survival(o)
            | Command::Offspring(o)
            | Command::Stationarity(o)
            | Command::Domination(o)
            | Command::Blocks(o)
            | Command::OracleCheck(o) => o,
        }
    }
}

#[derive(Args, Clone, Default)]
struct Opts {
    /// Flat key=value file supplying defaults; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// How branching and killing share site randomness: layered or joint
    #[arg(long)]
    mode: Option<String>,
    /// Macroscopic branching strength (per-site probability is b*e^-beta)
    #[arg(long)]
    b: Option<f64>,
    /// Macroscopic killing strength; comma list forms the grid for `survival`
    #[arg(long)]
    k: Option<String>,
    /// Diffusive scaling exponent
    #[arg(long)]
    beta: Option<f64>,
    /// Macroscopic duration (horizon, cap, or T0 depending on subcommand)
    #[arg(long)]
    t: Option<f64>,
    /// Macroscopic window half-width (or box edge for kill-intensity)
    #[arg(long = "L")]
    l: Option<f64>,
    /// Age threshold for kill-intensity; comma list forms the grid for `sparseness`
    #[arg(long)]
    eps: Option<String>,
    /// Block half-width for `blocks`
    #[arg(long)]
    m: Option<f64>,
    /// Block height for `blocks`; start count for `domination`; lattice
    /// half-width for `oracle-check`
    #[arg(long)]
    n: Option<f64>,
    /// Monte Carlo replicates (stored lattices for oracle-check)
    #[arg(long)]
    reps: Option<usize>,
    /// Environment seed; replicate r derives its own stream from it
    #[arg(long)]
    seed: Option<u64>,
    /// Output format: csv or json
    #[arg(long)]
    format: Option<String>,
    /// Write data here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for replicate fan-out; output is identical for any value
    #[arg(long)]
    threads: Option<usize>,
    /// Negative control: break the arrow rotation inside oracle-check
    #[arg(long, hide = true)]
    corrupt_rotation: bool,
}

/// A usage/config problem (exit 2) or a runtime failure (exit 1).
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::runtime(e.0)
    }
}

/// Fully resolved run parameters: defaults, then config file, then flags.
#[derive(Clone, Serialize)]
struct Resolved {
    #[serde(skip)]
    command: String,
    mode: String,
    b: f64,
    k: Vec<f64>,
    beta: f64,
    t: f64,
    #[serde(rename = "L")]
    l: f64,
    eps: Vec<f64>,
    m: f64,
    n: f64,
    reps: usize,
    seed: u64,
    // deliberately absent from the output: results are identical for every
    // thread count, and echoing it would break that byte-for-byte
    #[serde(skip)]
    threads: usize,
    format: String,
    #[serde(skip)]
    out: Option<PathBuf>,
    #[serde(skip)]
    corrupt_rotation: bool,
}

fn parse_list(text: &str, flag: &str) -> Result<Vec<f64>, Failure> {
    let vals: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match vals {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(Failure::usage(format!(
            "--{flag} expects a number or comma-separated numbers; got '{text}'"
        ))),
    }
}

fn read_config_file(path: &PathBuf) -> Result<BTreeMap<String, String>, Failure> {
    const KNOWN: &[&str] = &[
        "mode", "b", "k", "beta", "t", "L", "eps", "m", "n", "reps", "seed", "format", "out",
        "threads",
    ];
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Failure::usage(format!(
                "{}:{}: expected key=value, got '{line}'",
                path.display(),
                lineno + 1
            )));
        };
        let key = key.trim();
        if !KNOWN.contains(&key) {
            return Err(Failure::usage(format!(
                "{}:{}: unknown key '{key}'",
                path.display(),
                lineno + 1
            )));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn resolve(command: &Command) -> Result<Resolved, Failure> {
    let opts = command.opts();
    let file = match &opts.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    let get = |flag_val: Option<String>, key: &str| -> Option<String> {
        flag_val.or_else(|| file.get(key).cloned())
    };
    let parse_num = |text: Option<String>, key: &str, default: f64| -> Result<f64, Failure> {
        match text {
            Some(s) => s
                .parse::<f64>()
                .map_err(|_| Failure::usage(format!("--{key} expects a number; got '{s}'"))),
            None => Ok(default),
        }
    };
    // per-command default for the overloaded --n
    let n_default = match command {
        Command::OracleCheck(_) => 40.0,
        Command::Domination(_) => 5.0,
        _ => 4.0,
    };
    let mode = get(opts.mode.clone(), "mode").unwrap_or_else(|| "layered".into());
    if mode != "layered" && mode != "joint" {
        return Err(Failure::usage(format!(
            "--mode must be 'layered' or 'joint'; got '{mode}'"
        )));
    }
    let format = get(opts.format.clone(), "format").unwrap_or_else(|| "csv".into());
    if format != "csv" && format != "json" {
        return Err(Failure::usage(format!(
            "--format must be 'csv' or 'json'; got '{format}'"
        )));
    }
    let k = match get(opts.k.clone(), "k") {
        Some(s) => parse_list(&s, "k")?,
        None => vec![0.0],
    };
    let eps = match get(opts.eps.clone(), "eps") {
        Some(s) => parse_list(&s, "eps")?,
        None => vec![1.0],
    };
    let reps = match get(opts.reps.map(|r| r.to_string()), "reps") {
        Some(s) => s
            .parse::<usize>()
            .map_err(|_| Failure::usage(format!("--reps expects a count; got '{s}'")))?,
        None => 400,
    };
    let seed = match get(opts.seed.map(|s| s.to_string()), "seed") {
        Some(s) => s
            .parse::<u64>()
            .map_err(|_| Failure::usage(format!("--seed expects an integer; got '{s}'")))?,
        None => 42,
    };
    let threads = match get(opts.threads.map(|s| s.to_string()), "threads") {
        Some(s) => s
            .parse::<usize>()
            .map_err(|_| Failure::usage(format!("--threads expects a count; got '{s}'")))?,
        None => 1,
    };
    if reps == 0 {
        return Err(Failure::usage("--reps must be at least 1"));
    }
    if threads == 0 {
        return Err(Failure::usage("--threads must be at least 1"));
    }
    let out = opts
        .out
        .clone()
        .or_else(|| file.get("out").map(PathBuf::from));
    let resolved = Resolved {
        command: command.name().to_string(),
        mode,
        b: parse_num(get(opts.b.map(|v| v.to_string()), "b"), "b", 1.0)?,
        k,
        beta: parse_num(get(opts.beta.map(|v| v.to_string()), "beta"), "beta", 4.0)?,
        t: parse_num(get(opts.t.map(|v| v.to_string()), "t"), "t", 1.0)?,
        l: parse_num(get(opts.l.map(|v| v.to_string()), "L"), "L", 1.0)?,
        eps,
        m: parse_num(get(opts.m.map(|v| v.to_string()), "m"), "m", 1.0)?,
        n: parse_num(get(opts.n.map(|v| v.to_string()), "n"), "n", n_default)?,
        reps,
        seed,
        threads,
        format,
        out,
        corrupt_rotation: opts.corrupt_rotation,
    };
    Ok(resolved)
}

impl Resolved {
    fn mode_enum(&self) -> Mode {
        if self.mode == "joint" {
            Mode::Joint
        } else {
            Mode::Layered
        }
    }

    /// Single-value k for subcommands that don't sweep it.
    fn k_single(&self) -> Result<f64, Failure> {
        if self.k.len() != 1 {
            return Err(Failure::usage(format!(
                "this subcommand takes one k value (a k grid is only for \
                 'survival'); got {:?}",
                self.k
            )));
        }
        Ok(self.k[0])
    }

    fn eps_single(&self) -> Result<f64, Failure> {
        if self.eps.len() != 1 {
            return Err(Failure::usage(format!(
                "this subcommand takes one eps value (an eps grid is only for \
                 'sparseness'); got {:?}",
                self.eps
            )));
        }
        Ok(self.eps[0])
    }

    fn scaled(&self, k: f64) -> Result<ScaledConfig, Failure> {
        let cfg = ScaledConfig {
            mode: self.mode_enum(),
            b: self.b,
            k,
            beta: self.beta,
            seed: self.seed,
            threads: self.threads,
        };
        cfg.validate().map_err(|e| Failure::usage(e.0))?;
        Ok(cfg)
    }
}

#[derive(Clone, Serialize)]
struct Row {
    quantity: String,
    mean: f64,
    std_error: f64,
    reference: Option<f64>,
    replicates: usize,
    grid: Option<f64>,
    notes: String,
}

impl Row {
    fn from_estimate(quantity: &str, e: &Estimate, grid: Option<f64>) -> Self {
        Row {
            quantity: quantity.to_string(),
            mean: e.mean,
            std_error: e.std_error,
            reference: e.reference,
            replicates: e.replicates,
            grid,
            notes: e.notes.clone(),
        }
    }

    fn scalar(quantity: &str, value: f64, replicates: usize, notes: &str) -> Self {
        Row {
            quantity: quantity.to_string(),
            mean: value,
            std_error: 0.0,
            reference: None,
            replicates,
            grid: None,
            notes: notes.to_string(),
        }
    }
}

fn quantile_rows(prefix: &str, samples: &[f64], reps: usize) -> Vec<Row> {
    [(0.25, "q25"), (0.5, "q50"), (0.75, "q75")]
        .iter()
        .map(|&(q, tag)| Row::scalar(&format!("{prefix}_{tag}"), quantile(samples, q), reps, ""))
        .collect()
}

fn run_command(rc: &Resolved) -> Result<Vec<Row>, Failure> {
    match rc.command.as_str() {
        "density" => {
            let cfg = rc.scaled(rc.k_single()?)?;
            let e = estimate_density(&cfg, rc.t, rc.l, rc.reps)?;
            Ok(vec![Row::from_estimate("windowed_point_count", &e, None)])
        }
        "kill-intensity" => {
            let cfg = rc.scaled(rc.k_single()?)?;
            let bounds = MacroBox {
                x_lo: 0.0,
                x_hi: rc.l,
                t_lo: 0.0,
                t_hi: rc.t,
            };
            let e = estimate_kill_intensity(&cfg, &bounds, rc.eps_single()?, rc.reps)?;
            Ok(vec![Row::from_estimate("aged_kill_count", &e, None)])
        }
        "theta" => {
            let cfg = rc.scaled(rc.k_single()?)?;
            let s = estimate_theta(&cfg, rc.l, rc.t, rc.reps)?;
            let mut rows = vec![Row::from_estimate("first_mark_hit_time", &s.estimate, None)];
            rows.extend(quantile_rows("first_mark_hit_time", &s.samples, rc.reps));
            rows.push(Row::scalar(
                "hit_uniqueness_fraction",
                s.uniqueness_fraction,
                rc.reps,
                "among replicates that hit before the cap",
            ));
            rows.push(Row::scalar(
                "censored_fraction",
                s.censored_fraction,
                rc.reps,
                "",
            ));
            Ok(rows)
        }
        "renewal" => {
            let cfg = rc.scaled(rc.k_single()?)?;
            let g = estimate_renewal_gaps(&cfg, rc.l, rc.t, rc.reps)?;
            let mut rows = vec![Row::from_estimate("max_renewal_gap", &g.estimate, None)];
            rows.extend(quantile_rows("max_renewal_gap", &g.per_replicate_max, rc.reps));
            let complete: usize = g.per_replicate_gaps.iter().map(Vec::len).sum();
            rows.push(Row::scalar(
                "complete_gaps_total",
                complete as f64,
                rc.reps,
                "uncensored renewal gaps pooled over replicates",
            ));
            Ok(rows)
        }
        "sparseness" => {
            let k = rc.k_single()?;
            if k <= 0.0 {
                return Err(Failure::usage(
                    "sparseness needs k > 0: the hit time it conditions on never \
                     happens without killing marks",
                ));
            }
            let cfg = rc.scaled(k)?;
            let s = estimate_sparseness(&cfg, rc.l, &rc.eps, rc.reps)?;
            let mut rows: Vec<Row> = s
                .p_small
                .iter()
                .map(|(eps, e)| Row::from_estimate("p_min_gap_below_eps", e, Some(*eps)))
                .collect();
            rows.push(Row::scalar(
                "min_gap_censored_runs",
                s.censored as f64,
                rc.reps,
                "hit time ran past the internal cap",
            ));
            Ok(rows)
        }
        "survival" => {
            let cfg = rc.scaled(rc.k[0])?;
            let mut grid = rc.k.clone();
            grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let es = survival_curve(&cfg, &grid, rc.t, rc.reps)?;
            Ok(grid
                .iter()
                .zip(&es)
                .map(|(k, e)| Row::from_estimate("survival_probability", e, Some(*k)))
                .collect())
        }
        "offspring" => {
            let cfg = rc.scaled(rc.k_single()?)?;
            let e = offspring_mean(&cfg, rc.reps)?;
            Ok(vec![Row::from_estimate("offspring_mean", &e, None)])
        }
        "stationarity" => {
            let k = rc.k_single()?;
            if k != 0.0 {
                return Err(Failure::usage(
                    "stationarity is a killing-free diagnostic; pass k = 0",
                ));
            }
            let cfg = rc.scaled(0.0)?;
            let steps = cfg.round_time(rc.t);
            if steps % 2 != 0 {
                return Err(Failure::usage(format!(
                    "--t resolves to {steps} lattice steps; the stationary law \
                     repeats only every two steps, pick a duration giving an \
                     even count"
                )));
            }
            let core = cfg.round_len(rc.l).max(2);
            let window = Window::new(-core, core, steps);
            let report = bernoulli_stationarity(
                cfg.b_site(),
                steps,
                &window,
                rc.reps,
                rc.seed,
                rc.threads,
            )
            .map_err(|e| Failure::usage(e.0))?;
            Ok(vec![
                Row::from_estimate("intensity_drift", &report.intensity_drift, None),
                Row::from_estimate("pair_correlation_distance2", &report.pair_correlation, None),
                Row {
                    quantity: "gap_chi2_statistic".into(),
                    mean: report.gap_gof.statistic,
                    std_error: 0.0,
                    reference: Some(report.gap_gof.critical_95),
                    replicates: rc.reps,
                    grid: None,
                    notes: format!(
                        "pass when statistic <= reference (chi-square 95th pct, dof={})",
                        report.gap_gof.dof
                    ),
                },
            ])
        }
        "domination" => {
            let cfg = rc.scaled(rc.k_single()?)?;
            let count = rc.n.round() as usize;
            if count < 1 {
                return Err(Failure::usage("--n (number of starts) must be >= 1"));
            }
            let starts: Vec<LatticePoint> = (0..count)
                .map(|i| LatticePoint::new(2 * i as i64 - 2 * (count as i64 / 2), 0))
                .collect();
            let horizon = cfg.round_time(rc.t);
            let report = domination_check(&cfg, &starts, horizon, rc.reps)?;
            if let Some((rep, step, site)) = report.violation {
                return Err(Failure::runtime(format!(
                    "domination violated in replicate {rep} at step {step}, site {site}"
                )));
            }
            Ok(vec![Row::scalar(
                "domination_violations",
                0.0,
                rc.reps,
                &format!("{} starts x {horizon} steps, inclusion held everywhere", count),
            )])
        }
        "blocks" => {
            let cfg = rc.scaled(rc.k_single()?)?;
            let offsets = [-2.0 * rc.m, -rc.m, 0.0, rc.m, 2.0 * rc.m];
            let es = block_crossing(&cfg, rc.m, rc.n, &offsets, rc.reps)?;
            let mut rows: Vec<Row> = offsets
                .iter()
                .zip(&es)
                .map(|(v, e)| Row::from_estimate("crossing_probability", e, Some(*v)))
                .collect();
            let min = es.iter().map(|e| e.mean).fold(f64::INFINITY, f64::min);
            rows.push(Row {
                quantity: "min_crossing_probability".into(),
                mean: min,
                std_error: 0.0,
                reference: Some(bck_core::estimators::ORIENTED_SITE_PERCOLATION_THRESHOLD),
                replicates: rc.reps,
                grid: None,
                notes: "reference is the external oriented-site-percolation threshold".into(),
            });
            Ok(rows)
        }
        "oracle-check" => oracle_check(rc),
        other => unreachable!("unknown command {other}"),
    }
}

// ----------------------------------------------------------- oracle check

/// Forward reachability from the full line on a stored lattice — breadth
/// first over explicit arrows, no dual construction anywhere.
fn stored_reachability(field: &ArrowField, w: i64, t_max: i64) -> Vec<Vec<bool>> {
    let span = w + t_max;
    let width = (2 * span + 1) as usize;
    let idx = |x: i64| (x + span) as usize;
    let mut reach = vec![vec![false; width]; (t_max + 1) as usize];
    for x in -span..=span {
        if x & 1 == 0 {
            reach[0][idx(x)] = true;
        }
    }
    for t in 0..t_max {
        for x in -span..=span {
            if !reach[t as usize][idx(x)] {
                continue;
            }
            let site = LatticePoint::new(x, t);
            let (left, right) = match field.outcome_at(site).kind {
                Kind::Both => (true, true),
                Kind::LeftOnly => (true, false),
                Kind::RightOnly => (false, true),
                Kind::Kill => match field.resolved_web_outcome(site, Web::Left) {
                    Dir::Left => (true, false),
                    Dir::Right => (false, true),
                },
            };
            if left && x - 1 >= -span {
                reach[(t + 1) as usize][idx(x - 1)] = true;
            }
            if right && x + 1 <= span {
                reach[(t + 1) as usize][idx(x + 1)] = true;
            }
        }
    }
    reach
}

/// Membership decided by wedge walls whose rotation is deliberately inverted:
/// the negative control demonstrating the check catches a broken duality.
fn corrupted_membership(field: &ArrowField, x: i64, t: i64, s: i64) -> bool {
    let mut l = x + 1;
    let mut r = x - 1;
    let mut row = t;
    while row > s {
        let dl = match field.resolved_web_outcome(LatticePoint::new(l, row - 1), Web::Left) {
            Dir::Left => -1, // wrong way round
            Dir::Right => 1,
        };
        let dr = match field.resolved_web_outcome(LatticePoint::new(r, row - 1), Web::Right) {
            Dir::Right => 1, // wrong way round
            Dir::Left => -1,
        };
        l += dl;
        r += dr;
        row -= 1;
        if l == r {
            return false;
        }
    }
    true
}

fn oracle_check(rc: &Resolved) -> Result<Vec<Row>, Failure> {
    let w = rc.n.round() as i64;
    if w < 1 {
        return Err(Failure::usage("--n (lattice half-width) must be >= 1"));
    }
    if w > 60 {
        return Err(Failure::usage(format!(
            "--n {w} exceeds the stored-lattice limit of 60"
        )));
    }
    let t_max = w;
    // the reference grid: both parameterizations across branch/kill corners;
    // joint mode cannot represent b=1 with k=0.2 (mass would exceed 1)
    let mut combos: Vec<(Mode, f64, f64)> = Vec::new();
    for &(b, k) in &[(0.0, 0.0), (0.3, 0.0), (1.0, 0.0), (0.0, 0.2), (0.3, 0.2), (1.0, 0.2)] {
        combos.push((Mode::Layered, b, k));
        if b + k <= 1.0 {
            combos.push((Mode::Joint, b, k));
        }
    }
    let mut sites_checked = 0u64;
    let mut audits = 0u64;
    let mut discrepancies = 0u64;
    let mut first: Option<(LatticePoint, String)> = None;
    for lattice in 0..rc.reps {
        let (mode, b, k) = combos[lattice % combos.len()];
        let field = ArrowField::with_kill_resampling(FieldParams {
            mode,
            b,
            k,
            seed: derive_seed(rc.seed, lattice as u64, domain::REPLICATE),
        });
        let reach = stored_reachability(&field, w, t_max);
        let span = w + t_max;
        for t in 0..=t_max {
            for x in (-w..=w).filter(|x| (x + t) & 1 == 0) {
                let by_walls = if rc.corrupt_rotation {
                    corrupted_membership(&field, x, t, 0)
                } else {
                    membership(&field, x, t, 0)
                };
                let by_bfs = reach[t as usize][(x + span) as usize];
                sites_checked += 1;
                if by_walls != by_bfs {
                    discrepancies += 1;
                    if first.is_none() {
                        first = Some((
                            LatticePoint::new(x, t),
                            format!("lattice {lattice} (mode={mode:?}, b={b}, k={k})"),
                        ));
                    }
                }
            }
        }
        // non-crossing audit: a forward web path and a dual wall of the same
        // web keep their order over the whole height
        for web in [Web::Left, Web::Right] {
            let rule = match web {
                Web::Left => HopRule::Leftmost,
                Web::Right => HopRule::Rightmost,
            };
            for dy in [-3i64, 1, 5] {
                let fwd = trace_path(
                    &field,
                    LatticePoint::new(0, 0),
                    rule,
                    t_max,
                    Killing::Off,
                    None,
                );
                let mut fwd_pos = vec![0i64];
                let mut acc = 0i64;
                for &s in &fwd.steps {
                    acc += s as i64;
                    fwd_pos.push(acc);
                }
                let mut dual_pos = vec![0i64; (t_max + 1) as usize];
                let mut p = LatticePoint::new(dy, t_max);
                dual_pos[t_max as usize] = p.x;
                for t in (0..t_max).rev() {
                    p = bck_core::dual::dual_step(&field, p, web);
                    dual_pos[t as usize] = p.x;
                }
                audits += 1;
                let sign0 = (dual_pos[0] - fwd_pos[0]).signum();
                for t in 0..=t_max as usize {
                    if (dual_pos[t] - fwd_pos[t]).signum() != sign0 {
                        discrepancies += 1;
                        if first.is_none() {
                            first = Some((
                                LatticePoint::new(dual_pos[t], t as i64),
                                format!("path crossing, lattice {lattice} ({web:?})"),
                            ));
                        }
                    }
                }
            }
        }
    }
    if discrepancies > 0 {
        let (site, context) = first.unwrap();
        return Err(Failure::runtime(format!(
            "{discrepancies} discrepancies over {sites_checked} sites; first \
             counterexample at {site} in {context}"
        )));
    }
    Ok(vec![Row::scalar(
        "oracle_discrepancies",
        0.0,
        rc.reps,
        &format!(
            "{sites_checked} sites and {audits} path audits across {} stored \
             lattices, all consistent",
            rc.reps
        ),
    )])
}

// ----------------------------------------------------------------- output

fn format_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn join_list(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn write_csv<W: Write>(sink: W, rc: &Resolved, rows: &[Row]) -> Result<(), Failure> {
    let fail = |e: &dyn std::fmt::Display| Failure::runtime(format!("cannot write output: {e}"));
    let mut w = csv::Writer::from_writer(sink);
    w.write_record([
        "quantity",
        "mean",
        "std_error",
        "reference",
        "replicates",
        "beta",
        "b",
        "k",
        "seed",
        "mode",
        "t",
        "L",
        "eps",
        "m",
        "n",
        "grid",
        "notes",
    ])
    .map_err(|e| fail(&e))?;
    for row in rows {
        w.write_record([
            row.quantity.clone(),
            row.mean.to_string(),
            row.std_error.to_string(),
            format_opt(row.reference),
            row.replicates.to_string(),
            rc.beta.to_string(),
            rc.b.to_string(),
            join_list(&rc.k),
            rc.seed.to_string(),
            rc.mode.clone(),
            rc.t.to_string(),
            rc.l.to_string(),
            join_list(&rc.eps),
            rc.m.to_string(),
            rc.n.to_string(),
            format_opt(row.grid),
            row.notes.clone(),
        ])
        .map_err(|e| fail(&e))?;
    }
    w.flush().map_err(|e| fail(&e))
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    command: &'a str,
    config: &'a Resolved,
    rows: &'a [Row],
}

fn emit(rc: &Resolved, rows: &[Row]) -> Result<(), Failure> {
    let payload = |sink: &mut dyn Write| -> Result<(), Failure> {
        if rc.format == "json" {
            let doc = JsonDoc {
                command: &rc.command,
                config: rc,
                rows,
            };
            let text = serde_json::to_string_pretty(&doc)
                .map_err(|e| Failure::runtime(format!("cannot encode output: {e}")))?;
            writeln!(sink, "{text}")
                .map_err(|e| Failure::runtime(format!("cannot write output: {e}")))
        } else {
            write_csv(sink, rc, rows)
        }
    };
    match &rc.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .map_err(|e| Failure::runtime(format!("cannot create {}: {e}", path.display())))?;
            payload(&mut file)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            payload(&mut lock)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let rc = match resolve(&cli.command) {
        Ok(rc) => rc,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    match run_command(&rc).and_then(|rows| emit(&rc, &rows)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
