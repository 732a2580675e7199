//! Space-time lattice geometry: sites, parity, windows, diffusive rescaling.
//!
//! Forward dynamics lives on the even sublattice {(x,t) : x+t even}; the dual
//! system lives on the odd sublattice. Both coordinates are dimensionless
//! integers; the diffusive map [`rescale`] sends them to macroscopic units.

/// One lattice site (x,t). Forward sites have x+t even, dual sites odd.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct LatticePoint {
    pub x: i64,
    pub t: i64,
}

impl LatticePoint {
    pub fn new(x: i64, t: i64) -> Self {
        Self { x, t }
    }

    /// True on the even sublattice, where walkers live.
    #[inline]
    pub fn is_forward(&self) -> bool {
        (self.x + self.t) & 1 == 0
    }

    /// True on the odd sublattice, where dual paths live.
    #[inline]
    pub fn is_dual(&self) -> bool {
        !self.is_forward()
    }
}

impl std::fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.t)
    }
}

/// Diffusive rescaling: (x,t) ↦ (x·e^{−β}, t·e^{−2β}).
#[inline]
pub fn rescale(p: LatticePoint, beta: f64) -> (f64, f64) {
    (p.x as f64 * (-beta).exp(), p.t as f64 * (-2.0 * beta).exp())
}

/// Measurement window \[x_lo, x_hi\] with a simulation buffer on each side.
///
/// Results are reported only on the core; the simulation runs on
/// \[x_lo − buffer, x_hi + buffer\]. Because influence propagates at speed one,
/// a buffer at least as large as the elapsed time makes the core exact.
#[derive(Clone, Copy, Debug)]
pub struct Window {
    pub x_lo: i64,
    pub x_hi: i64,
    pub buffer: i64,
}

impl Window {
    pub fn new(x_lo: i64, x_hi: i64, buffer: i64) -> Self {
        assert!(x_lo < x_hi, "window needs x_lo < x_hi; got [{x_lo}, {x_hi}]");
        assert!(buffer >= 0, "window buffer must be non-negative");
        Self { x_lo, x_hi, buffer }
    }

    /// Centered window \[−half, half\].
    pub fn centered(half: i64, buffer: i64) -> Self {
        Self::new(-half, half, buffer)
    }

    #[inline]
    pub fn sim_lo(&self) -> i64 {
        self.x_lo - self.buffer
    }

    #[inline]
    pub fn sim_hi(&self) -> i64 {
        self.x_hi + self.buffer
    }

    #[inline]
    pub fn contains_core(&self, x: i64) -> bool {
        (self.x_lo..=self.x_hi).contains(&x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_split() {
        assert!(LatticePoint::new(0, 0).is_forward());
        assert!(LatticePoint::new(-3, 5).is_forward());
        assert!(LatticePoint::new(1, 0).is_dual());
        assert!(LatticePoint::new(0, 7).is_dual());
    }

    #[test]
    fn rescale_identity_at_beta_zero() {
        let (x, t) = rescale(LatticePoint::new(-5, 9), 0.0);
        assert_eq!((x, t), (-5.0, 9.0));
    }

    #[test]
    fn rescale_unit_point() {
        // (round(e^4), round(e^8)) maps to roughly (1,1) at beta = 4
        let p = LatticePoint::new(55, 2981);
        let (x, t) = rescale(p, 4.0);
        assert!((x - 1.0).abs() < 0.01, "x = {x}");
        assert!((t - 1.0).abs() < 0.01, "t = {t}");
    }

    #[test]
    fn rescale_time_only() {
        let (x, t) = rescale(LatticePoint::new(0, 100), 1.0);
        assert_eq!(x, 0.0);
        assert!((t - 100.0 * (-2.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn window_ranges() {
        let w = Window::centered(10, 3);
        assert_eq!((w.sim_lo(), w.sim_hi()), (-13, 13));
        assert!(w.contains_core(10) && !w.contains_core(11));
    }

    #[test]
    #[should_panic(expected = "x_lo < x_hi")]
    fn window_rejects_empty() {
        Window::new(5, 5, 0);
    }
}
