//! Nonnegative weights for size-vector tables: exact big integers, or
//! doubles scaled by `12^{-k}` for an edge of size `k`.
//!
//! An edge of a scheme carries two forests with `σ` trees each and `k - σ`
//! edges between them, plus `σ` label steps along the edge. Concatenating the
//! two forests gives a forest with `2σ` trees, so the number of forest pairs
//! is `F(2σ, k - σ)`. Forest labels contribute `3^{k-σ}`. The label steps
//! along the edge contribute `3^σ` when the edge lies on the spanning tree
//! of the scheme, and the bound `Motz(σ, 0)` otherwise.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::forest::{count_forests, log_sum_exp, motzkin_count, pick_weighted_f64};

/// How the label steps along a scheme edge are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// Free steps: `3^σ`.
    Tree,
    /// Bounded by the bridge count to 0: `Motz(σ, 0)`.
    Cycle,
}

pub trait Weight: Clone + Send + Sync + std::fmt::Debug + 'static {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn from_u64(x: u64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Weight of one edge of size `k` with `σ` trees on each side.
    fn edge(k: usize, sigma: usize, kind: EdgeKind) -> Self;
    /// `Σ_σ edge(k, σ)` for `k = 0..len`.
    fn edge_series(len: usize, kind: EdgeKind) -> Vec<Self> {
        (0..len)
            .map(|k| (1..=k).fold(Self::zero(), |acc, s| acc.add(&Self::edge(k, s, kind))))
            .collect()
    }
    /// Index drawn with probability proportional to `weights`.
    fn pick<R: Rng + ?Sized>(weights: &[Self], rng: &mut R) -> usize;
    /// Process-wide cache for size tables of this weight type.
    fn table_cache() -> &'static Mutex<HashMap<(usize, usize), Arc<dyn std::any::Any + Send + Sync>>>;
}

/// Sum of `Π` over the sequence; truncated product of two series.
pub fn convolve<W: Weight>(a: &[W], b: &[W], len: usize) -> Vec<W> {
    let mut out = vec![W::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
    }
    out
}

impl Weight for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn from_u64(x: u64) -> Self {
        BigUint::from(x)
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn edge(k: usize, sigma: usize, kind: EdgeKind) -> Self {
        if sigma == 0 || sigma > k {
            return Zero::zero();
        }
        let forests = count_forests(2 * sigma, k - sigma);
        let steps = match kind {
            EdgeKind::Tree => BigUint::from(3u32).pow(k as u32),
            EdgeKind::Cycle => motzkin_count(sigma, 0) * BigUint::from(3u32).pow((k - sigma) as u32),
        };
        forests * steps
    }

    fn pick<R: Rng + ?Sized>(weights: &[Self], rng: &mut R) -> usize {
        let total: BigUint = weights.iter().sum();
        assert!(!Zero::is_zero(&total), "weights must not all vanish");
        let mut x = uniform_below(&total, rng);
        for (i, w) in weights.iter().enumerate() {
            if &x < w {
                return i;
            }
            x -= w;
        }
        unreachable!("x is below the total")
    }

    fn table_cache() -> &'static Mutex<HashMap<(usize, usize), Arc<dyn std::any::Any + Send + Sync>>> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<dyn std::any::Any + Send + Sync>>>> =
            OnceLock::new();
        CACHE.get_or_init(Default::default)
    }
}

/// Uniform integer in `0..bound` by rejection on random bits.
pub fn uniform_below<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top_mask = if bits % 32 == 0 { u32::MAX } else { (1u32 << (bits % 32)) - 1 };
    loop {
        let mut digits: Vec<u32> = (0..words).map(|_| rng.random()).collect();
        if let Some(last) = digits.last_mut() {
            *last &= top_mask;
        }
        let x = BigUint::from_slice(&digits);
        if &x < bound {
            return x;
        }
    }
}

/// A double carrying `w · 12^{-k}` for a weight `w` of total size `k`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Scaled(pub f64);

struct LnTables {
    fact: Vec<f64>,
    motz0: Vec<f64>,
}

fn ln_tables(n: usize) -> Arc<LnTables> {
    static CACHE: OnceLock<Mutex<Option<Arc<LnTables>>>> = OnceLock::new();
    let mut guard = CACHE.get_or_init(Default::default).lock().expect("table lock");
    if let Some(t) = guard.as_ref() {
        if t.fact.len() > 2 * n + 1 {
            return Arc::clone(t);
        }
    }
    let size = (2 * n + 2).max(64);
    let mut fact = vec![0.0; size + 1];
    for i in 1..=size {
        fact[i] = fact[i - 1] + (i as f64).ln();
    }
    let ln_multi = |n: usize, a: usize, b: usize| fact[n] - fact[a] - fact[b] - fact[n - a - b];
    let motz0 = (0..=size / 2)
        .map(|s| {
            let terms: Vec<f64> = (0..=s / 2).map(|d| ln_multi(s, d, d)).collect();
            log_sum_exp(&terms)
        })
        .collect();
    let t = Arc::new(LnTables { fact, motz0 });
    *guard = Some(Arc::clone(&t));
    t
}

impl Weight for Scaled {
    fn zero() -> Self {
        Scaled(0.0)
    }

    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }

    fn from_u64(x: u64) -> Self {
        Scaled(x as f64)
    }

    fn add(&self, other: &Self) -> Self {
        Scaled(self.0 + other.0)
    }

    fn mul(&self, other: &Self) -> Self {
        Scaled(self.0 * other.0)
    }

    fn edge(k: usize, sigma: usize, kind: EdgeKind) -> Self {
        Scaled(scaled_edge(&ln_tables(k), k, sigma, kind))
    }

    fn edge_series(len: usize, kind: EdgeKind) -> Vec<Self> {
        let t = ln_tables(len);
        (0..len)
            .map(|k| Scaled((1..=k).map(|s| scaled_edge(&t, k, s, kind)).sum()))
            .collect()
    }

    fn pick<R: Rng + ?Sized>(weights: &[Self], rng: &mut R) -> usize {
        let w: Vec<f64> = weights.iter().map(|w| w.0).collect();
        pick_weighted_f64(&w, rng)
    }

    fn table_cache() -> &'static Mutex<HashMap<(usize, usize), Arc<dyn std::any::Any + Send + Sync>>> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<dyn std::any::Any + Send + Sync>>>> =
            OnceLock::new();
        CACHE.get_or_init(Default::default)
    }
}

fn scaled_edge(t: &LnTables, k: usize, sigma: usize, kind: EdgeKind) -> f64 {
    if sigma == 0 || sigma > k {
        return 0.0;
    }
    let m = k - sigma;
    let len = 2 * m + 2 * sigma;
    let ln_f = ((2 * sigma) as f64).ln() - (len as f64).ln() + t.fact[len] - t.fact[m] - t.fact[len - m];
    let ln3 = 3f64.ln();
    let ln_steps = match kind {
        EdgeKind::Tree => k as f64 * ln3,
        EdgeKind::Cycle => t.motz0[sigma] + m as f64 * ln3,
    };
    (ln_f + ln_steps - k as f64 * 12f64.ln()).exp()
}

/// `Motz(σ, l) / Motz(σ, 0)` as a coin: exact for `σ ≤ 60`.
pub fn bridge_ratio_coin<R: Rng + ?Sized>(sigma: usize, l: i64, rng: &mut R) -> bool {
    if l.unsigned_abs() as usize > sigma {
        return false;
    }
    if sigma <= 60 {
        let top = motzkin_count(sigma, 0).to_u128().expect("fits");
        let num = motzkin_count(sigma, l).to_u128().expect("fits");
        rng.random_range(0..top) < num
    } else {
        let r = crate::forest::ln_motzkin_count(sigma, l) - crate::forest::ln_motzkin_count(sigma, 0);
        rng.random::<f64>() < r.exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn scaled_matches_exact() {
        for k in 1..30 {
            for sigma in 1..=k {
                for kind in [EdgeKind::Tree, EdgeKind::Cycle] {
                    let exact = BigUint::edge(k, sigma, kind).to_f64().unwrap() / 12f64.powi(k as i32);
                    let s = Scaled::edge(k, sigma, kind).0;
                    assert!((s - exact).abs() <= 1e-10 * exact, "{k} {sigma} {kind:?}: {s} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn convolution_of_counts() {
        let a: Vec<BigUint> = [1u64, 2, 3].iter().map(|&x| BigUint::from(x)).collect();
        let b: Vec<BigUint> = [4u64, 5].iter().map(|&x| BigUint::from(x)).collect();
        let c = convolve(&a, &b, 4);
        let want: Vec<BigUint> = [4u64, 13, 22, 15].iter().map(|&x| BigUint::from(x)).collect();
        assert_eq!(c, want);
    }

    #[test]
    fn exact_pick_frequencies() {
        let mut rng = crate::Rng::seed_from_u64(3);
        let w: Vec<BigUint> = [1u64, 0, 3].iter().map(|&x| BigUint::from(x)).collect();
        let mut hits = [0usize; 3];
        for _ in 0..40_000 {
            hits[BigUint::pick(&w, &mut rng)] += 1;
        }
        assert_eq!(hits[1], 0);
        assert!((hits[0] as f64 / 10_000.0 - 1.0).abs() < 0.05);
    }
}
