//! Counter-based per-site randomness.
//!
//! Every random decision in the model is a pure function of
//! `(seed, x, t, stream)`. Dual paths, membership tests and age queries visit
//! sites the forward simulation never touched; hashing coordinates on demand
//! keeps all of them consistent without storing the lattice, and makes every
//! replicate reproducible from its seed alone.

/// Variate stream carrying the arrow kind at a site.
pub const STREAM_KIND: u32 = 0;
/// Variate stream carrying the kill threshold at a site (monotone in k).
pub const STREAM_KILL: u32 = 1;
/// Variate stream resampling a direction at joint-mode killing sites, so the
/// killing-free reference system is well defined there.
pub const STREAM_RESAMPLE: u32 = 2;
/// Variate stream breaking ties for uniform-hop path tracing at branch sites.
pub const STREAM_HOP: u32 = 3;
/// Variate stream for initial occupancy fields (Bernoulli starts).
pub const STREAM_INIT: u32 = 4;

/// Domain tags for [`derive_seed`], keeping derived seed families disjoint.
pub mod domain {
    /// Per-replicate environment seeds.
    pub const REPLICATE: u64 = 0x9e37_79b9_7f4a_7c15;
    /// Per-label environments inside one replicate (domination coupling).
    pub const LABEL: u64 = 0xc2b2_ae3d_27d4_eb4f;
}

const GAMMA_X: u64 = 0x9e37_79b9_7f4a_7c15;
const GAMMA_T: u64 = 0xbf58_476d_1ce4_e5b9;
const GAMMA_S: u64 = 0x94d0_49bb_1331_11eb;

/// 64-bit finalizer with full avalanche (the splitmix64 finalizer).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    z
}

/// Hash of one site/stream coordinate tuple. Two mixing rounds so that the
/// linear structure of the packed coordinates cannot survive into the output.
#[inline]
pub fn site_hash(seed: u64, x: i64, t: i64, stream: u32) -> u64 {
    let h = mix64(seed ^ (x as u64).wrapping_mul(GAMMA_X));
    mix64(h ^ (t as u64).wrapping_mul(GAMMA_T) ^ (stream as u64).wrapping_mul(GAMMA_S))
}

/// Uniform variate in [0,1) for a site/stream coordinate tuple.
#[inline]
pub fn site_uniform(seed: u64, x: i64, t: i64, stream: u32) -> f64 {
    // 53 high bits -> double in [0,1)
    (site_hash(seed, x, t, stream) >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Derive an independent child seed from `(seed, index)` within a domain.
#[inline]
pub fn derive_seed(seed: u64, index: u64, tag: u64) -> u64 {
    mix64(mix64(seed ^ tag) ^ index.wrapping_mul(GAMMA_X))
}
