//! Small statistics toolbox shared by the estimators: replicate summaries,
//! quantiles, and the two goodness-of-fit tests the verification suite leans
//! on (two-sample Kolmogorov–Smirnov and binned chi-square against a
//! geometric law).

/// Sample mean and standard error of the mean (unbiased variance, n−1).
/// A single observation has standard error 0 by convention.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    assert!(!xs.is_empty(), "mean of an empty sample");
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Linear-interpolation quantile (the common spreadsheet/NumPy default):
/// with h = (n−1)q, returns x_(⌊h⌋) + (h−⌊h⌋)(x_(⌊h⌋+1) − x_(⌊h⌋)) on the
/// sorted sample. The input need not be sorted.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    assert!(!xs.is_empty(), "quantile of an empty sample");
    assert!((0.0..=1.0).contains(&q), "quantile level {q} outside [0,1]");
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in quantile input"));
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if frac == 0.0 || lo + 1 >= sorted.len() {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

/// Two-sample Kolmogorov–Smirnov statistic: the largest gap between the two
/// empirical distribution functions.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "KS needs two nonempty samples");
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).expect("no NaN in KS input"));
    sb.sort_by(|x, y| x.partial_cmp(y).expect("no NaN in KS input"));
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d_max = 0.0f64;
    while i < sa.len() && j < sb.len() {
        let xi = sa[i];
        let xj = sb[j];
        let x = xi.min(xj);
        while i < sa.len() && sa[i] <= x {
            i += 1;
        }
        while j < sb.len() && sb[j] <= x {
            j += 1;
        }
        let d = (i as f64 / na - j as f64 / nb).abs();
        if d > d_max {
            d_max = d;
        }
    }
    d_max
}

/// 5%-level critical value for the two-sample KS statistic (asymptotic):
/// 1.358·√((n+m)/(n·m)).
pub fn ks_critical_5pct(n: usize, m: usize) -> f64 {
    assert!(n > 0 && m > 0);
    let (nf, mf) = (n as f64, m as f64);
    1.358 * ((nf + mf) / (nf * mf)).sqrt()
}

/// 95th percentile of the chi-square distribution. Exact table for small
/// degrees of freedom, Wilson–Hilferty cube approximation beyond (relative
/// error under 0.1% there).
pub fn chi2_critical_95(dof: usize) -> f64 {
    const TABLE: [f64; 10] = [
        3.8415, 5.9915, 7.8147, 9.4877, 11.0705, 12.5916, 14.0671, 15.5073, 16.9190, 18.3070,
    ];
    assert!(dof > 0, "chi-square needs at least one degree of freedom");
    if dof <= TABLE.len() {
        return TABLE[dof - 1];
    }
    let k = dof as f64;
    let z95 = 1.6448536269514722;
    let inner = 1.0 - 2.0 / (9.0 * k) + z95 * (2.0 / (9.0 * k)).sqrt();
    k * inner * inner * inner
}

/// Result of a goodness-of-fit test: reject at 5% when the statistic exceeds
/// the critical value.
#[derive(Clone, Copy, Debug)]
pub struct Gof {
    pub statistic: f64,
    pub critical_95: f64,
    pub dof: usize,
}

impl Gof {
    pub fn pass(&self) -> bool {
        self.statistic <= self.critical_95
    }
}

/// Chi-square test of integer gaps (support 1, 2, …) against Geometric(p),
/// i.e. P(g) = (1−p)^{g−1}·p. Gap values are binned individually while the
/// expected count stays at least 5; the remainder is pooled into a tail bin
/// (merged into the last bin if too thin). The success probability is given,
/// not fitted, so dof = bins − 1.
pub fn geometric_gap_gof(gaps: &[u64], p: f64) -> Gof {
    assert!((0.0 < p) && (p < 1.0), "geometric parameter {p} outside (0,1)");
    assert!(!gaps.is_empty(), "no gaps to test");
    for &g in gaps {
        assert!(g >= 1, "geometric gaps start at 1; got {g}");
    }
    let n = gaps.len() as f64;
    // individual bins g = 1..=g_max with expected >= 5
    let mut g_max = 0u64;
    loop {
        let e = n * p * (1.0 - p).powi(g_max as i32);
        if e < 5.0 || g_max >= 10_000 {
            break;
        }
        g_max += 1;
    }
    if g_max == 0 {
        g_max = 1; // too few samples for any fine bin; one bin plus tail
    }
    let mut expected: Vec<f64> = (1..=g_max)
        .map(|g| n * p * (1.0 - p).powi(g as i32 - 1))
        .collect();
    let tail = n * (1.0 - p).powi(g_max as i32);
    expected.push(tail);
    let mut observed = vec![0.0f64; expected.len()];
    for &g in gaps {
        let idx = if g <= g_max {
            g as usize - 1
        } else {
            expected.len() - 1
        };
        observed[idx] += 1.0;
    }
    // thin tail: pool it into the last individual bin
    if tail < 5.0 && expected.len() >= 2 {
        let t = expected.pop().unwrap();
        let o = observed.pop().unwrap();
        *expected.last_mut().unwrap() += t;
        *observed.last_mut().unwrap() += o;
    }
    let statistic: f64 = expected
        .iter()
        .zip(&observed)
        .map(|(e, o)| (o - e) * (o - e) / e)
        .sum();
    let dof = expected.len().saturating_sub(1).max(1);
    Gof {
        statistic,
        critical_95: chi2_critical_95(dof),
        dof,
    }
}
