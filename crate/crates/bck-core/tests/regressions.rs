//! Law-level regressions beyond the acceptance gate: scaling floors,
//! structural zeros, certificate margins, and independence diagnostics that
//! pin estimator behavior against drift.

use bck_core::estimators::{
    block_crossing, estimate_sparseness, estimate_theta, ScaledConfig,
    ORIENTED_SITE_PERCOLATION_THRESHOLD,
};
use bck_core::stats::{ks_critical_5pct, quantile, two_sample_ks};
use bck_core::Mode;

fn cfg(b: f64, k: f64, beta: f64, seed: u64) -> ScaledConfig {
    ScaledConfig {
        mode: Mode::Layered,
        b,
        k,
        beta,
        seed,
        threads: 4,
    }
}

/// E[first hit time] · L0² stays bounded away from zero as the strip
/// widens: wider strips meet marks sooner, but no faster than the
/// inverse-square rate. Caps shrink with L0 in step with the hit-time
/// scale, so censoring stays negligible and only shrinks the mean.
#[test]
fn hit_time_times_width_squared_stays_above_its_floor() {
    let mut products = Vec::new();
    for (l0, t_cap, seed) in [
        (1.0, 2.0, 7001u64),
        (2.0, 1.0, 7002),
        (4.0, 0.5, 7003),
        (8.0, 0.25, 7004),
    ] {
        let c = cfg(1.0, 1.0, 4.0, seed);
        let s = estimate_theta(&c, l0, t_cap, 120).unwrap();
        assert!(
            s.censored_fraction < 0.05,
            "cap too tight at L0={l0}: {:.3} censored",
            s.censored_fraction
        );
        products.push(s.estimate.mean * l0 * l0);
    }
    let floor = products.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(
        floor >= 0.12,
        "inf over L0 of E[hit time]*L0^2 fell to {floor:.4}; products {products:?}"
    );
}

/// The first hit is overwhelmingly a single-site event.
#[test]
fn the_first_mark_hit_is_usually_a_unique_site() {
    let c = cfg(1.0, 1.0, 4.0, 7005);
    let s = estimate_theta(&c, 1.0, 2.0, 120).unwrap();
    assert!(
        s.uniqueness_fraction > 0.75,
        "uniqueness fraction {:.3}",
        s.uniqueness_fraction
    );
}

/// At the moment the net first touches a mark it is still spread out: the
/// minimum point gap has no mass near zero. Below the lattice parity floor
/// of 2·e^{−β} the probability is exactly zero by construction, and the
/// tail probabilities grow with the threshold.
#[test]
fn minimum_gap_at_the_hit_time_has_no_mass_near_zero() {
    let c = cfg(1.0, 1.0, 4.0, 7006);
    let eps_grid = [0.01, 0.1, 0.5, 1.0];
    let s = estimate_sparseness(&c, 1.0, &eps_grid, 120).unwrap();
    let p: Vec<f64> = s.p_small.iter().map(|(_, e)| e.mean).collect();
    // 0.01 < 2e^{-4} = 0.0366: structurally impossible, not merely rare
    assert_eq!(p[0], 0.0, "found mass below the parity floor: {:?}", s.p_small);
    for w in p.windows(2) {
        assert!(w[1] >= w[0], "P(gap < eps) must grow with eps: {p:?}");
    }
    assert!(
        p[3] > 0.5,
        "a unit threshold should capture most runs; got {:.3}",
        p[3]
    );
}

/// Saturated branching with weak killing crosses tall blocks from every
/// start, with margin over the oriented-percolation threshold that the
/// coarse-grained renormalization argument compares against.
#[test]
fn block_crossing_certificate_clears_the_comparison_threshold() {
    let c = cfg(1.0, 0.02, 0.0, 7007);
    let offsets = [-40.0, -20.0, 0.0, 20.0, 40.0];
    let es = block_crossing(&c, 20.0, 80.0, &offsets, 200).unwrap();
    let min_p = es.iter().map(|e| e.mean).fold(f64::INFINITY, f64::min);
    assert!(
        min_p > ORIENTED_SITE_PERCOLATION_THRESHOLD,
        "worst start crossed with probability {min_p:.3}, below the \
         comparison threshold {ORIENTED_SITE_PERCOLATION_THRESHOLD}"
    );
    assert!(min_p > 0.9, "certificate margin eroded: min P = {min_p:.3}");
}

/// Successive renewal gaps are exchangeable: the first and second gap of
/// each run are draws from one law. A two-sample KS test at the 5% level
/// (on a fixed seed, so no flake) must not separate them.
#[test]
fn successive_renewal_gaps_share_one_distribution() {
    let c = cfg(1.0, 1.0, 4.0, 7008);
    let g = bck_core::estimators::estimate_renewal_gaps(&c, 1.0, 1.0, 160).unwrap();
    let mut first = Vec::new();
    let mut second = Vec::new();
    for gaps in &g.per_replicate_gaps {
        if gaps.len() >= 2 {
            first.push(gaps[0]);
            second.push(gaps[1]);
        }
    }
    assert!(
        first.len() >= 40,
        "too few double-renewal runs to compare: {}",
        first.len()
    );
    let stat = two_sample_ks(&first, &second);
    let crit = ks_critical_5pct(first.len(), second.len());
    assert!(
        stat <= crit,
        "KS statistic {stat:.4} exceeds the 5% critical value {crit:.4} \
         (n={}, m={})",
        first.len(),
        second.len()
    );
    // and their medians agree to well within the IQR scale
    let mshift = (quantile(&first, 0.5) - quantile(&second, 0.5)).abs();
    let iqr = quantile(&first, 0.75) - quantile(&first, 0.25);
    assert!(mshift < iqr, "median shift {mshift:.4} vs IQR {iqr:.4}");
}

/// Taller blocks are harder to cross: the certificate probability cannot
/// grow when the block height quadruples at fixed width.
#[test]
fn taller_blocks_are_no_easier_to_cross() {
    let offsets = [0.0];
    let short = block_crossing(&cfg(1.0, 0.05, 0.0, 7009), 10.0, 40.0, &offsets, 300).unwrap();
    let tall = block_crossing(&cfg(1.0, 0.05, 0.0, 7009), 10.0, 160.0, &offsets, 300).unwrap();
    assert!(
        tall[0].mean <= short[0].mean + 3.0 * (tall[0].std_error + short[0].std_error),
        "crossing got easier with height: {:.3} (n=40) -> {:.3} (n=160)",
        short[0].mean,
        tall[0].mean
    );
}
