//! Closed-form and dynamic-programming reference values the Monte Carlo
//! estimators are checked against.
//!
//! Everything here is deterministic: a high-accuracy normal CDF, the exact
//! density profile of the branching–coalescing limit started from the full
//! line, the exact lattice hitting-time law of the wedge-wall gap, and the
//! killing-intensity reference assembled from them.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal CDF, absolute error below 1e−12 over the whole line.
///
/// Computed as erfc(|z|/√2)/2 on the far side and complemented, so both tails
/// keep full relative precision. The erfc itself switches between the
/// positive-term Maclaurin expansion of erf (small argument, no cancellation)
/// and a Lentz-evaluated continued fraction (large argument).
pub fn normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    let x = z * FRAC_1_SQRT_2;
    if x < 0.0 {
        0.5 * erfc_positive(-x)
    } else {
        1.0 - 0.5 * erfc_positive(x)
    }
}

/// erfc(x) for x ≥ 0.
fn erfc_positive(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    if x < 2.0 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// erf(x) = (2x·e^{−x²}/√π) · Σ_n (2x²)^n / (2n+1)!! — every term positive,
/// so no cancellation; converges fast for x < 2.
fn erf_series(x: f64) -> f64 {
    let two_x2 = 2.0 * x * x;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut n = 0u32;
    loop {
        n += 1;
        term *= two_x2 / (2.0 * n as f64 + 1.0);
        sum += term;
        if term < sum * 1e-17 || n > 200 {
            break;
        }
    }
    2.0 * x * (-x * x).exp() / PI.sqrt() * sum
}

/// erfc(x) = (e^{−x²}/√π) / (x + (1/2)/(x + 1/(x + (3/2)/(x + …)))) via the
/// modified Lentz algorithm; used for x ≥ 2 where it converges quickly.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x.max(TINY);
    let mut c = f;
    let mut d = 0.0f64;
    for n in 1..400u32 {
        let a = n as f64 / 2.0;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-x * x).exp() / PI.sqrt() / f
}

/// Density of the branching–coalescing limit at macroscopic time `tau`,
/// started from every point of the line, with branching strength `b`:
///
/// ρ(τ) = e^{−b²τ}/√(πτ) + 2b·Φ(b·√(2τ)).
///
/// At b = 0 this is the coalescing-walk density 1/√(πτ); as τ → ∞ it
/// saturates at 2b, the branching–coalescing equilibrium.
pub fn xi_density(b: f64, tau: f64) -> f64 {
    assert!(tau > 0.0, "density needs a positive time; got tau = {tau}");
    assert!(b >= 0.0, "branching strength must be nonnegative; got b = {b}");
    (-b * b * tau).exp() / (PI * tau).sqrt() + 2.0 * b * normal_cdf(b * (2.0 * tau).sqrt())
}

/// Exact probability that the wedge-wall gap, started at its minimum value,
/// stays positive for `n` backward steps at per-site branching `b`.
///
/// The half-gap process starts at 1, moves +1/0/−1 with probabilities
/// (1+b)²/4, (1−b²)/2, (1−b)²/4, and is absorbed at 0. The DP truncates
/// nothing: the state after m steps is at most m+1, and total mass
/// (surviving + absorbed) is asserted to stay within 1e−12 of 1.
pub fn hitting_survival(b: f64, n: u64) -> f64 {
    assert!((0.0..=1.0).contains(&b), "b = {b} outside [0,1]");
    let p_up = (1.0 + b) * (1.0 + b) / 4.0;
    let p_stay = (1.0 - b * b) / 2.0;
    let p_down = (1.0 - b) * (1.0 - b) / 4.0;
    let n_us = usize::try_from(n).expect("step count fits a usize");
    // cur[h] = P(half-gap = h, not yet absorbed); h ranges over 1..=n+1
    let mut cur = vec![0.0f64; n_us + 2];
    let mut nxt = vec![0.0f64; n_us + 2];
    cur[1] = 1.0;
    let mut absorbed = 0.0f64;
    let mut hi = 1usize; // highest reachable state so far
    for _ in 0..n_us {
        for v in nxt[..=hi + 1].iter_mut() {
            *v = 0.0;
        }
        absorbed += cur[1] * p_down;
        for h in 1..=hi {
            let p = cur[h];
            if p == 0.0 {
                continue;
            }
            nxt[h + 1] += p * p_up;
            nxt[h] += p * p_stay;
            if h > 1 {
                nxt[h - 1] += p * p_down;
            }
        }
        std::mem::swap(&mut cur, &mut nxt);
        hi += 1;
    }
    let surviving: f64 = cur[1..=hi].iter().sum();
    let mass = surviving + absorbed;
    assert!(
        (mass - 1.0).abs() <= 1e-12,
        "probability mass drifted to {mass}"
    );
    surviving
}

/// Expected number of killing marks of age at least `eps` inside a
/// macroscopic region of space-time area `area`, in the scaling limit:
/// killing strength × area × density of the killing-free system at age
/// horizon `eps`.
pub fn expected_aged_kill_count(k: f64, area: f64, b: f64, eps: f64) -> f64 {
    assert!(k >= 0.0 && area >= 0.0);
    k * area * xi_density(b, eps)
}
