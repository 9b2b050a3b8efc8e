//! Forests with a floor, their contour encodings, and Motzkin paths.
//!
//! A forest with `σ` trees has floor nodes `1..=σ+1` (the last one is always
//! childless). Node ids are dense: floor node `j` has id `j - 1`, other nodes
//! follow in order of first visit along the facial sequence.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const FLOOR: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Forest {
    sigma: usize,
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
}

impl Forest {
    /// The forest of `sigma` single-node trees.
    pub fn trivial(sigma: usize) -> Self {
        assert!(sigma >= 1);
        Self { sigma, parent: vec![FLOOR; sigma + 1], children: vec![Vec::new(); sigma + 1] }
    }

    /// Number of trees `t(f)`.
    pub fn tree_count(&self) -> usize {
        self.sigma
    }

    /// Number of tree edges `m`.
    pub fn edge_count(&self) -> usize {
        self.parent.len() - self.sigma - 1
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    /// Length `2m + σ` of the contour.
    pub fn contour_len(&self) -> usize {
        2 * self.edge_count() + self.sigma
    }

    pub fn is_floor(&self, u: usize) -> bool {
        self.parent[u] == FLOOR
    }

    pub fn parent(&self, u: usize) -> Option<usize> {
        (self.parent[u] != FLOOR).then_some(self.parent[u])
    }

    pub fn children(&self, u: usize) -> &[usize] {
        &self.children[u]
    }

    /// Node address as a word: floor index followed by child ranks, all from 1.
    pub fn address(&self, mut u: usize) -> Vec<usize> {
        let mut rev = Vec::new();
        while self.parent[u] != FLOOR {
            let p = self.parent[u];
            rev.push(self.children[p].iter().position(|&c| c == u).expect("child") + 1);
            u = p;
        }
        rev.push(u + 1);
        rev.reverse();
        rev
    }

    /// Nodes along the facial sequence, length `2m + σ + 1`.
    pub fn facial_sequence(&self) -> Vec<usize> {
        let mut seq = Vec::with_capacity(self.contour_len() + 1);
        // Stack of (node, index of next child to visit).
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for j in 0..self.sigma {
            stack.push((j, 0));
            seq.push(j);
            while let Some(top) = stack.last_mut() {
                let (u, k) = *top;
                if k < self.children[u].len() {
                    top.1 += 1;
                    let c = self.children[u][k];
                    stack.push((c, 0));
                    seq.push(c);
                } else {
                    stack.pop();
                    if let Some(&(p, _)) = stack.last() {
                        seq.push(p);
                    }
                }
            }
        }
        seq.push(self.sigma);
        seq
    }

    /// Height contour `C(i) = depth(f(i)) + σ + 1 - floor index`.
    pub fn contour(&self) -> Vec<i64> {
        let mut c = Vec::with_capacity(self.contour_len() + 1);
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for j in 0..self.sigma {
            let base = (self.sigma - j) as i64;
            stack.push((j, 0));
            c.push(base);
            while let Some(top) = stack.last_mut() {
                let (u, k) = *top;
                if k < self.children[u].len() {
                    top.1 += 1;
                    stack.push((self.children[u][k], 0));
                } else {
                    stack.pop();
                    if stack.is_empty() {
                        break;
                    }
                }
                c.push(base + stack.len() as i64 - 1);
            }
        }
        c.push(0);
        c
    }

    /// Decodes a height contour.
    pub fn from_contour(c: &[i64]) -> Result<Self> {
        if c.len() < 2 {
            return Err(Error::MalformedContour("contour needs at least two samples".into()));
        }
        let sigma = c[0];
        if sigma < 1 {
            return Err(Error::MalformedContour(format!("C(0) = {sigma} must be positive")));
        }
        if *c.last().unwrap() != 0 {
            return Err(Error::MalformedContour("contour must end at 0".into()));
        }
        let sigma = sigma as usize;
        let mut f = Self::trivial(sigma);
        let mut cur = 0usize;
        for (i, w) in c.windows(2).enumerate() {
            if w[0] <= 0 {
                return Err(Error::MalformedContour(format!("C({i}) = {} before the end", w[0])));
            }
            match w[1] - w[0] {
                1 => {
                    let id = f.parent.len();
                    f.parent.push(cur);
                    f.children.push(Vec::new());
                    f.children[cur].push(id);
                    cur = id;
                }
                -1 => {
                    cur = if f.parent[cur] == FLOOR { cur + 1 } else { f.parent[cur] };
                }
                d => {
                    return Err(Error::MalformedContour(format!("step {d} at position {i}")));
                }
            }
        }
        debug_assert_eq!(cur, sigma);
        Ok(f)
    }
}

/// A forest with a label on every node, zero on the floor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WellLabeledForest {
    pub forest: Forest,
    pub labels: Vec<i64>,
}

impl WellLabeledForest {
    pub fn new(forest: Forest, labels: Vec<i64>) -> Result<Self> {
        let wf = Self { forest, labels };
        wf.validate()?;
        Ok(wf)
    }

    pub fn unlabeled(forest: Forest) -> Self {
        let labels = vec![0; forest.node_count()];
        Self { forest, labels }
    }

    pub fn validate(&self) -> Result<()> {
        let f = &self.forest;
        if self.labels.len() != f.node_count() {
            return Err(Error::MalformedContour("one label per node required".into()));
        }
        for u in 0..f.node_count() {
            match f.parent(u) {
                None if self.labels[u] != 0 => {
                    return Err(Error::MalformedContour(format!("floor node {u} has a label")))
                }
                Some(p) if (self.labels[u] - self.labels[p]).abs() > 1 => {
                    return Err(Error::MalformedContour(format!("label jump at node {u}")))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn contour_pair(&self) -> ContourPair {
        let c = self.forest.contour();
        let l = self.forest.facial_sequence().iter().map(|&u| self.labels[u]).collect();
        ContourPair { c, l }
    }

    pub fn decode_contour(cp: &ContourPair) -> Result<Self> {
        cp.check_shape()?;
        let forest = Forest::from_contour(&cp.c)?;
        let seq = forest.facial_sequence();
        let mut labels = vec![i64::MIN; forest.node_count()];
        for (i, &u) in seq.iter().enumerate() {
            if labels[u] == i64::MIN {
                labels[u] = cp.l[i];
            } else if labels[u] != cp.l[i] {
                return Err(Error::MalformedContour(format!("node revisited with new label at {i}")));
            }
        }
        let wf = Self { forest, labels };
        wf.validate()?;
        Ok(wf)
    }
}

/// Height and label contours of a labelled forest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContourPair {
    pub c: Vec<i64>,
    pub l: Vec<i64>,
}

impl ContourPair {
    pub fn sigma(&self) -> usize {
        self.c[0].max(0) as usize
    }

    pub fn m(&self) -> usize {
        (self.c.len() - 1 - self.sigma()) / 2
    }

    fn check_shape(&self) -> Result<()> {
        if self.c.len() != self.l.len() || self.c.is_empty() {
            return Err(Error::MalformedContour("C and L must have equal nonzero length".into()));
        }
        if self.l[0] != 0 {
            return Err(Error::MalformedContour("L(0) must be 0".into()));
        }
        for (i, w) in self.l.windows(2).enumerate() {
            if (w[1] - w[0]).abs() > 1 {
                return Err(Error::MalformedContour(format!("label step too large at {i}")));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,C,L\n");
        for (i, (c, l)) in self.c.iter().zip(&self.l).enumerate() {
            out.push_str(&format!("{i},{c},{l}\n"));
        }
        out
    }
}

/// Running minimum of a sequence.
pub fn running_min(c: &[i64]) -> Vec<i64> {
    let mut out = Vec::with_capacity(c.len());
    let mut m = i64::MAX;
    for &x in c {
        m = m.min(x);
        out.push(m);
    }
    out
}

/// `|F_σ^m| = σ / (2m + σ) · C(2m + σ, m)`.
pub fn count_forests(sigma: usize, m: usize) -> BigUint {
    assert!(sigma >= 1);
    let len = 2 * m + sigma;
    binomial(len, m) * BigUint::from(sigma) / BigUint::from(len)
}

/// Natural log of [`count_forests`].
pub fn ln_count_forests(sigma: usize, m: usize) -> f64 {
    let len = (2 * m + sigma) as f64;
    (sigma as f64).ln() - len.ln() + ln_binomial(2 * m + sigma, m)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

pub fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

pub fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Uniform forest with `sigma` trees and `m` edges, by the cycle lemma.
pub fn sample_forest<R: Rng + ?Sized>(sigma: usize, m: usize, rng: &mut R) -> Forest {
    Forest::from_contour(&sample_forest_contour(sigma, m, rng)).expect("cycle lemma output")
}

/// Height contour of a uniform forest: a uniform first-passage walk from
/// `sigma` to 0 with `m` up-steps.
pub fn sample_forest_contour<R: Rng + ?Sized>(sigma: usize, m: usize, rng: &mut R) -> Vec<i64> {
    assert!(sigma >= 1);
    let len = 2 * m + sigma;
    let mut steps: Vec<i8> = Vec::with_capacity(len);
    steps.resize(m, 1);
    steps.resize(len, -1);
    steps.shuffle(rng);
    // Record lows of the partial sums: hits[k] = first time the walk reaches -k.
    let mut hits = vec![0usize];
    let mut s = 0i64;
    for (i, &x) in steps.iter().enumerate() {
        s += x as i64;
        if -s == hits.len() as i64 {
            hits.push(i + 1);
        }
    }
    let depth = hits.len() - 1;
    // Exactly the starts at the last σ record lows give a first passage at the end.
    let r = rng.random_range(0..sigma);
    let start = hits[depth - r] % len;
    let mut c = Vec::with_capacity(len + 1);
    let mut h = sigma as i64;
    c.push(h);
    for k in 0..len {
        h += steps[(start + k) % len] as i64;
        c.push(h);
    }
    debug_assert_eq!(h, 0);
    c
}

/// Uniform rooted plane tree with `n` edges, as a one-tree forest contour.
pub fn sample_dyck_path<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<i64> {
    let c = sample_forest_contour(1, n, rng);
    c[..c.len() - 1].iter().map(|x| x - 1).collect()
}

/// A lattice path with steps in {-1, 0, 1} starting at 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MotzkinPath {
    pub values: Vec<i64>,
}

impl MotzkinPath {
    pub fn new(values: Vec<i64>) -> Result<Self> {
        if values.first() != Some(&0) {
            return Err(Error::IncompatibleQuadruple("Motzkin path must start at 0".into()));
        }
        if values.windows(2).any(|w| (w[1] - w[0]).abs() > 1) {
            return Err(Error::IncompatibleQuadruple("Motzkin step outside {-1,0,1}".into()));
        }
        Ok(Self { values })
    }

    pub fn flat(len: usize) -> Self {
        Self { values: vec![0; len + 1] }
    }

    /// Number of steps.
    pub fn lifetime(&self) -> usize {
        self.values.len() - 1
    }

    pub fn end(&self) -> i64 {
        *self.values.last().unwrap()
    }

    /// The path read backwards and shifted to start at 0.
    pub fn reversed(&self) -> Self {
        let end = self.end();
        Self { values: self.values.iter().rev().map(|v| v - end).collect() }
    }
}

/// Number of Motzkin paths of length `sigma` from 0 to `l`.
pub fn motzkin_count(sigma: usize, l: i64) -> BigUint {
    let a = l.unsigned_abs() as usize;
    if a > sigma {
        return BigUint::zero();
    }
    let mut total = BigUint::zero();
    // d down-steps, d + a up-steps, the rest flat.
    let mut d = 0;
    while 2 * d + a <= sigma {
        total += multinomial3(sigma, d + a, d);
        d += 1;
    }
    total
}

fn multinomial3(n: usize, a: usize, b: usize) -> BigUint {
    binomial(n, a) * binomial(n - a, b)
}

/// Natural log of [`motzkin_count`], accurate for large `sigma`.
pub fn ln_motzkin_count(sigma: usize, l: i64) -> f64 {
    let a = l.unsigned_abs() as usize;
    if a > sigma {
        return f64::NEG_INFINITY;
    }
    let terms: Vec<f64> =
        (0..=(sigma - a) / 2).map(|d| ln_multinomial3(sigma, d + a, d)).collect();
    log_sum_exp(&terms)
}

fn ln_multinomial3(n: usize, a: usize, b: usize) -> f64 {
    ln_factorial(n) - ln_factorial(a) - ln_factorial(b) - ln_factorial(n - a - b)
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Uniform Motzkin path of length `sigma` from 0 to `l`.
///
/// The number of down-steps is drawn with its exact share of the count,
/// then the steps are shuffled uniformly.
pub fn sample_motzkin_bridge<R: Rng + ?Sized>(
    sigma: usize,
    l: i64,
    rng: &mut R,
) -> Result<MotzkinPath> {
    let a = l.unsigned_abs() as usize;
    if a > sigma {
        return Err(Error::Unreachable { length: sigma, target: l });
    }
    let dmax = (sigma - a) / 2;
    let d = if sigma <= 60 {
        let weights: Vec<u128> = (0..=dmax)
            .map(|d| multinomial3(sigma, d + a, d).to_u128().expect("fits for sigma <= 60"))
            .collect();
        let total: u128 = weights.iter().sum();
        let mut x = rng.random_range(0..total);
        let mut pick = dmax;
        for (d, &w) in weights.iter().enumerate() {
            if x < w {
                pick = d;
                break;
            }
            x -= w;
        }
        pick
    } else {
        let logs: Vec<f64> = (0..=dmax).map(|d| ln_multinomial3(sigma, d + a, d)).collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = logs.iter().map(|x| (x - max).exp()).collect();
        pick_weighted_f64(&weights, rng)
    };
    let (up, down) = if l >= 0 { (d + a, d) } else { (d, d + a) };
    let mut steps: Vec<i8> = Vec::with_capacity(sigma);
    steps.resize(up, 1);
    steps.resize(up + down, -1);
    steps.resize(sigma, 0);
    steps.shuffle(rng);
    let mut values = Vec::with_capacity(sigma + 1);
    let mut v = 0i64;
    values.push(0);
    for s in steps {
        v += s as i64;
        values.push(v);
    }
    Ok(MotzkinPath { values })
}

/// Index drawn with probability proportional to nonnegative `weights`.
pub fn pick_weighted_f64<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    assert!(total > 0.0 && total.is_finite(), "weights must have positive finite sum");
    let mut x = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if x < w {
            return i;
        }
        x -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap()
}
