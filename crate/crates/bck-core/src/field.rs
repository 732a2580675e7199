//! The random environment: per-site outcomes for the BCK model and the dual
//! arrows derived from them.
//!
//! Two parameterizations are supported. In **joint** mode the four outcomes
//! split one probability mass: P(Both)=b, P(Kill)=k, P(LeftOnly)=P(RightOnly)
//! =(1−b−k)/2, and a killing site carries no arrow at all. In **layered** mode
//! the arrow kind never kills — P(Both)=b, P(LeftOnly)=P(RightOnly)=(1−b)/2 —
//! and an independent Bernoulli(k) kill mark is layered on top. The two laws
//! agree up to O(b·k) per site and coincide under diffusive scaling; layered
//! is the default because the killing marks there are independent of the
//! arrow configuration, which several estimators rely on.
//!
//! Kill decisions are realized by thresholding the dedicated kill stream, so
//! for a fixed seed the killed/marked site set at parameter k is a subset of
//! the one at any k′ ≥ k — monotonicity statements hold exactly per replicate.

use crate::lattice::LatticePoint;
use crate::rng::{site_uniform, STREAM_KILL, STREAM_KIND, STREAM_RESAMPLE};

/// How branching and killing share the per-site randomness.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    /// One outcome per site; killing sites have no arrows. Requires b+k ≤ 1.
    Joint,
    /// Arrow kind (never Kill) plus an independent kill mark.
    Layered,
}

/// Arrow configuration drawn at one forward site.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kind {
    Both,
    LeftOnly,
    RightOnly,
    Kill,
}

/// Everything the environment says about one site.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SiteOutcome {
    pub kind: Kind,
    /// Layered-mode kill mark, independent of `kind`. Always false in joint
    /// mode (killing is the `Kill` kind there).
    pub kill_mark: bool,
}

/// The two coalescing webs obtained by resolving every branch site to one side.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Web {
    Left,
    Right,
}

/// A single resolved arrow direction.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dir {
    Left,
    Right,
}

/// Model parameters plus the environment seed.
#[derive(Clone, Copy, Debug)]
pub struct FieldParams {
    pub mode: Mode,
    pub b: f64,
    pub k: f64,
    pub seed: u64,
}

impl FieldParams {
    /// Check the mode-specific probability constraints.
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.b) {
            return Err(format!("branch probability b = {} outside [0,1]", self.b));
        }
        if !(0.0..=1.0).contains(&self.k) {
            return Err(format!("kill probability k = {} outside [0,1]", self.k));
        }
        if self.mode == Mode::Joint && self.b + self.k > 1.0 {
            return Err(format!(
                "joint mode requires b + k <= 1; got b = {}, k = {}",
                self.b, self.k
            ));
        }
        Ok(())
    }
}

/// Deterministic, lazily evaluated environment. Immutable after construction;
/// safe to query from any number of threads.
#[derive(Clone, Copy, Debug)]
pub struct ArrowField {
    params: FieldParams,
    resample_kill_dirs: bool,
}

impl ArrowField {
    /// Environment without direction resampling at joint-mode killing sites;
    /// killing-free queries there are a contract violation.
    pub fn new(params: FieldParams) -> Self {
        params.validate().unwrap_or_else(|e| panic!("{e}"));
        Self {
            params,
            resample_kill_dirs: false,
        }
    }

    /// Environment that resamples a uniform direction at joint-mode killing
    /// sites (dedicated stream), so the killing-free reference system — which
    /// the age of a point is defined against — is well defined in joint mode.
    pub fn with_kill_resampling(params: FieldParams) -> Self {
        params.validate().unwrap_or_else(|e| panic!("{e}"));
        Self {
            params,
            resample_kill_dirs: true,
        }
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    /// The outcome drawn at a forward site.
    ///
    /// Joint marginals: (Both, Kill, LeftOnly, RightOnly) with probabilities
    /// (b, k, (1−b−k)/2, (1−b−k)/2). Layered: kind ∈ {Both, LeftOnly,
    /// RightOnly} with (b, (1−b)/2, (1−b)/2) and kill_mark ~ Bernoulli(k)
    /// independent.
    pub fn outcome_at(&self, site: LatticePoint) -> SiteOutcome {
        assert!(
            site.is_forward(),
            "outcome_at needs a forward (even-parity) site; got {site}"
        );
        let FieldParams { mode, b, k, seed } = self.params;
        let u_kind = site_uniform(seed, site.x, site.t, STREAM_KIND);
        match mode {
            Mode::Layered => {
                let kind = if u_kind < b {
                    Kind::Both
                } else if u_kind < b + (1.0 - b) / 2.0 {
                    Kind::LeftOnly
                } else {
                    Kind::RightOnly
                };
                let kill_mark =
                    k > 0.0 && site_uniform(seed, site.x, site.t, STREAM_KILL) < k;
                SiteOutcome { kind, kill_mark }
            }
            Mode::Joint => {
                let kind = if u_kind < b {
                    Kind::Both
                } else if k > 0.0
                    && site_uniform(seed, site.x, site.t, STREAM_KILL) < k / (1.0 - b)
                {
                    // Single-arrow candidates are the only ones eligible to
                    // kill; the threshold k/(1−b) restores the marginal P=k
                    // and stays monotone in k for fixed b.
                    Kind::Kill
                } else if u_kind < b + (1.0 - b) / 2.0 {
                    Kind::LeftOnly
                } else {
                    Kind::RightOnly
                };
                SiteOutcome {
                    kind,
                    kill_mark: false,
                }
            }
        }
    }

    /// The dual arrow at an odd site (x,t): the 180°-rotation image of the
    /// forward arrow at (x,t−1). Rotation swaps left and right — forward
    /// LeftOnly becomes dual RightOnly and vice versa — while Both and Kill
    /// are symmetric. Dual arrows point backward in time: dual LeftOnly at
    /// (x,t) is the edge (x,t) → (x−1,t−1).
    pub fn dual_outcome_at(&self, site: LatticePoint) -> SiteOutcome {
        assert!(
            site.is_dual(),
            "dual_outcome_at needs a dual (odd-parity) site; got {site}"
        );
        let below = self.outcome_at(LatticePoint::new(site.x, site.t - 1));
        let kind = match below.kind {
            Kind::Both => Kind::Both,
            Kind::LeftOnly => Kind::RightOnly,
            Kind::RightOnly => Kind::LeftOnly,
            Kind::Kill => Kind::Kill,
        };
        SiteOutcome {
            kind,
            kill_mark: below.kill_mark,
        }
    }

    /// The direction a web takes at a forward site: branch sites resolve to
    /// the web's own side, so P(Left | left web) = b + (1−b)/2 = (1+b)/2.
    ///
    /// Joint-mode killing sites have no arrow; with resampling enabled they
    /// draw a uniform direction from a dedicated stream, otherwise this is a
    /// contract violation (undefined arrow).
    pub fn resolved_web_outcome(&self, site: LatticePoint, web: Web) -> Dir {
        assert!(
            site.is_forward(),
            "resolved_web_outcome needs a forward site; got {site}"
        );
        match self.outcome_at(site).kind {
            Kind::Both => match web {
                Web::Left => Dir::Left,
                Web::Right => Dir::Right,
            },
            Kind::LeftOnly => Dir::Left,
            Kind::RightOnly => Dir::Right,
            Kind::Kill => {
                if self.resample_kill_dirs {
                    if site_uniform(self.params.seed, site.x, site.t, STREAM_RESAMPLE) < 0.5
                    {
                        Dir::Left
                    } else {
                        Dir::Right
                    }
                } else {
                    panic!(
                        "undefined arrow: joint-mode killing site {site} queried \
                         without kill resampling; build the field with \
                         ArrowField::with_kill_resampling for killing-free use"
                    )
                }
            }
        }
    }

    /// Whether a path occupying this site dies here: the Kill kind (joint) or
    /// a kill mark (layered).
    #[inline]
    pub fn is_killing_at(&self, site: LatticePoint) -> bool {
        let o = self.outcome_at(site);
        o.kind == Kind::Kill || o.kill_mark
    }
}
