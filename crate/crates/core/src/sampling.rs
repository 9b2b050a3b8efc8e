//! Uniform samplers for plane trees, labellings, well-labelled g-trees and
//! pointed quadrangulations.
//!
//! The exact sampler draws the decomposition of a uniform well-labelled
//! g-tree. Label steps along the scheme edges off a fixed spanning tree are
//! constrained (labels must close up around cycles), so sizes are first drawn
//! with those steps counted by the bound `Motz(σ, 0)`, and the whole draw is
//! accepted with probability `Π Motz(σ, l) / Motz(σ, 0)` over the cycle edges.

use std::any::Any;
use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cms::{cms_forward, PointedQuadrangulation};
use crate::error::{Error, Result};
use crate::forest::{
    sample_dyck_path, sample_forest, sample_forest_contour, sample_motzkin_bridge, Forest, MotzkinPath,
    WellLabeledForest,
};
use crate::gtree::{GTree, WellLabeledGTree};
use crate::map::{opp, CombinatorialMap};
use crate::scheme::{decompose, enumerate_schemes, recompose_labeled, Decomposition, TreeDecomposition};
use crate::weight::{bridge_ratio_coin, convolve, EdgeKind, Scaled, Weight};

/// Default size limit of the exact sampler.
pub const DEFAULT_EXACT_LIMIT: usize = 2000;

/// Largest size for which the exact sampler uses big-integer tables.
pub const BIG_INTEGER_LIMIT: usize = 64;

/// Largest genus handled by the samplers.
pub const MAX_GENUS: usize = crate::scheme::MAX_SCHEME_GENUS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Asymptotic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub genus: usize,
    pub n: usize,
    pub seed: u64,
    pub mode: Mode,
    pub exact_limit: usize,
}

impl SamplerConfig {
    pub fn new(genus: usize, n: usize, seed: u64, mode: Mode) -> Self {
        Self { genus, n, seed, mode, exact_limit: DEFAULT_EXACT_LIMIT }
    }

    pub fn validate(&self) -> Result<()> {
        if self.genus > MAX_GENUS {
            return Err(Error::GenusOutOfRange(self.genus));
        }
        let min = min_size(self.genus, self.mode);
        if self.n < min {
            return Err(Error::TooSmall { n: self.n, min });
        }
        if self.mode == Mode::Exact && self.n > self.exact_limit {
            return Err(Error::TooLarge { n: self.n, limit: self.exact_limit });
        }
        Ok(())
    }

    /// A well-labelled g-tree drawn with this configuration.
    pub fn sample_tree<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<WellLabeledGTree> {
        self.validate()?;
        match self.mode {
            Mode::Exact => sample_wl_gtree_exact_limited(self.genus, self.n, self.exact_limit, rng),
            Mode::Asymptotic => sample_wl_gtree_asymptotic(self.genus, self.n, rng),
        }
    }

    /// A pointed quadrangulation drawn with this configuration.
    pub fn sample_pointed<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PointedQuadrangulation> {
        let t = self.sample_tree(rng)?;
        let eps = if rng.random::<bool>() { 1 } else { -1 };
        Ok(cms_forward(&t, eps))
    }
}

/// Smallest size accepted by the samplers: a one-vertex g-tree has `2g`
/// edges, and the asymptotic sampler needs room for a dominant scheme.
pub fn min_size(genus: usize, mode: Mode) -> usize {
    match (genus, mode) {
        (0, _) => 1,
        (g, Mode::Exact) => 2 * g,
        (g, Mode::Asymptotic) => 6 * g - 3,
    }
}

/// Uniform rooted plane tree with `n` edges.
pub fn sample_plane_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GTree {
    assert!(n >= 1);
    let c = sample_dyck_path(n, rng);
    let mut stack = Vec::new();
    let mut word = Vec::with_capacity(2 * n);
    let mut next = 0usize;
    for w in c.windows(2) {
        if w[1] > w[0] {
            stack.push(next);
            word.push(next);
            next += 1;
        } else {
            word.push(stack.pop().expect("Dyck path"));
        }
    }
    GTree::from_gluing_word(&word).expect("Dyck word")
}

/// Uniform well-labelling of `t`.
///
/// Plane trees get independent uniform increments along their edges. For
/// positive genus the labels are drawn on the decomposition of `t`, which
/// keeps the labels consistent around the cycles of the tree.
pub fn sample_labels<R: Rng + ?Sized>(t: &GTree, rng: &mut R) -> WellLabeledGTree {
    if t.genus() == 0 {
        let m = t.map();
        let mut labels = vec![i64::MIN; t.vertex_count()];
        let root = m.vertex_of(m.root());
        labels[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for h in m.half_edges_at(v) {
                let w = m.target_of(h);
                if labels[w] == i64::MIN {
                    labels[w] = labels[v] + rng.random_range(-1..=1);
                    queue.push_back(w);
                }
            }
        }
        return WellLabeledGTree::new(t.clone(), labels).expect("increments in {-1,0,1}");
    }
    let shape = decompose(t).expect("positive genus");
    let kinds = edge_kinds(shape.scheme.map());
    loop {
        if let Some(d) = label_decomposition(&shape, &kinds, rng) {
            return recompose_labeled(&d).expect("valid quadruple");
        }
    }
}

/// Edge kinds of a scheme: a BFS spanning tree from the root vertex, taking
/// the root edge first unless it is a loop.
pub fn edge_kinds(scheme: &CombinatorialMap) -> Vec<EdgeKind> {
    let mut kinds = vec![EdgeKind::Cycle; scheme.edge_count()];
    let mut seen = vec![false; scheme.vertex_count()];
    let start = scheme.vertex_of(scheme.root());
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        let mut hs = scheme.half_edges_at(v);
        if v == start {
            let r = hs.iter().position(|&h| h == scheme.root()).expect("root at its origin");
            hs.rotate_left(r);
        }
        for h in hs {
            let w = scheme.target_of(h);
            if !seen[w] {
                seen[w] = true;
                kinds[h / 2] = EdgeKind::Tree;
                queue.push_back(w);
            }
        }
    }
    kinds
}

fn label_forest<R: Rng + ?Sized>(f: Forest, rng: &mut R) -> WellLabeledForest {
    let mut labels = vec![0i64; f.node_count()];
    // Children are numbered after their parents.
    for u in 0..f.node_count() {
        if let Some(p) = f.parent(u) {
            labels[u] = labels[p] + rng.random_range(-1..=1);
        }
    }
    WellLabeledForest { forest: f, labels }
}

fn free_path<R: Rng + ?Sized>(sigma: usize, rng: &mut R) -> MotzkinPath {
    let mut values = Vec::with_capacity(sigma + 1);
    let mut v = 0i64;
    values.push(0);
    for _ in 0..sigma {
        v += rng.random_range(-1..=1);
        values.push(v);
    }
    MotzkinPath { values }
}

/// Draws labels on a decomposition shape: forest labels and the paths of
/// tree edges freely, then cycle edges accepted with probability
/// `Motz(σ, l) / Motz(σ, 0)`. `None` means the draw was rejected.
pub fn label_decomposition<R: Rng + ?Sized>(
    shape: &TreeDecomposition,
    kinds: &[EdgeKind],
    rng: &mut R,
) -> Option<Decomposition> {
    let sm = shape.scheme.map();
    let hs = sm.half_edge_count();
    let mut motzkin: Vec<Option<MotzkinPath>> = vec![None; hs];
    let mut node_labels = vec![i64::MIN; sm.vertex_count()];
    let start = sm.vertex_of(sm.root());
    node_labels[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for h in sm.half_edges_at(v) {
            let e = h / 2;
            if kinds[e] != EdgeKind::Tree || motzkin[2 * e].is_some() {
                continue;
            }
            let p = free_path(shape.forests[2 * e].tree_count(), rng);
            let end = p.end();
            motzkin[2 * e + 1] = Some(p.reversed());
            motzkin[2 * e] = Some(p);
            let w = sm.target_of(h);
            node_labels[w] = node_labels[v] + if h % 2 == 0 { end } else { -end };
            queue.push_back(w);
        }
    }
    for e in 0..sm.edge_count() {
        if kinds[e] == EdgeKind::Cycle {
            let sigma = shape.forests[2 * e].tree_count();
            let l = node_labels[sm.target_of(2 * e)] - node_labels[sm.vertex_of(2 * e)];
            if !bridge_ratio_coin(sigma, l, rng) {
                return None;
            }
            let p = sample_motzkin_bridge(sigma, l, rng).expect("reachable after the coin");
            motzkin[2 * e + 1] = Some(p.reversed());
            motzkin[2 * e] = Some(p);
        }
    }
    let forests = shape.forests.iter().map(|f| label_forest(f.clone(), rng)).collect();
    Some(Decomposition {
        scheme: shape.scheme.clone(),
        forests,
        motzkin: motzkin.into_iter().map(|p| p.expect("every edge gets a path")).collect(),
        node_labels,
        u: shape.u,
    })
}

/// A scheme with its edges in sampling order: root edge, then the other
/// tree edges, then the other cycle edges.
struct Plan {
    scheme: usize,
    order: Vec<usize>,
    kinds: Vec<EdgeKind>,
}

struct Class<W> {
    plans: Vec<Plan>,
    root_kind: EdgeKind,
    trees: usize,
    cycles: usize,
    weight: W,
}

/// Size tables for one genus and one size.
struct SizeTables<W> {
    n: usize,
    tree: Vec<W>,
    cycle: Vec<W>,
    /// `T^i N^j`, truncated after index `n`.
    powers: HashMap<(usize, usize), Vec<W>>,
    classes: Vec<Class<W>>,
}

impl<W: Weight> SizeTables<W> {
    fn build(g: usize, n: usize) -> Result<Self> {
        let schemes = enumerate_schemes(g)?;
        let len = n + 1;
        let tree = W::edge_series(len, EdgeKind::Tree);
        let cycle = W::edge_series(len, EdgeKind::Cycle);
        let mut by_class: HashMap<(usize, usize, bool), Vec<Plan>> = HashMap::new();
        for (i, s) in schemes.iter().enumerate() {
            let sm = s.map();
            if sm.edge_count() > n {
                continue;
            }
            let kinds = edge_kinds(sm);
            let root_edge = sm.root() / 2;
            let mut order = vec![root_edge];
            order.extend((0..kinds.len()).filter(|&e| e != root_edge && kinds[e] == EdgeKind::Tree));
            order.extend((0..kinds.len()).filter(|&e| e != root_edge && kinds[e] == EdgeKind::Cycle));
            let trees = order[1..].iter().filter(|&&e| kinds[e] == EdgeKind::Tree).count();
            let cycles = order.len() - 1 - trees;
            let key = (trees, cycles, kinds[root_edge] == EdgeKind::Tree);
            by_class.entry(key).or_default().push(Plan { scheme: i, order, kinds });
        }
        let mut t = Self { n, tree, cycle, powers: HashMap::new(), classes: Vec::new() };
        let mut keys: Vec<_> = by_class.keys().copied().collect();
        keys.sort_unstable();
        for key in keys {
            let (trees, cycles, root_tree) = key;
            let root_kind = if root_tree { EdgeKind::Tree } else { EdgeKind::Cycle };
            let root = t.root_series(root_kind);
            let rest = t.power(trees, cycles).clone();
            let total = (0..=n).fold(W::zero(), |acc, k| acc.add(&root[k].mul(&rest[n - k])));
            let plans = by_class.remove(&key).expect("key");
            let weight = total.mul(&W::from_u64(plans.len() as u64));
            t.classes.push(Class { plans, root_kind, trees, cycles, weight });
        }
        Ok(t)
    }

    fn series(&self, kind: EdgeKind) -> &[W] {
        match kind {
            EdgeKind::Tree => &self.tree,
            EdgeKind::Cycle => &self.cycle,
        }
    }

    fn root_series(&self, kind: EdgeKind) -> Vec<W> {
        self.series(kind).iter().enumerate().map(|(k, w)| w.mul(&W::from_u64(k as u64))).collect()
    }

    fn power(&mut self, i: usize, j: usize) -> &Vec<W> {
        if !self.powers.contains_key(&(i, j)) {
            let len = self.n + 1;
            let p = if i == 0 && j == 0 {
                let mut one = vec![W::zero(); len];
                one[0] = W::from_u64(1);
                one
            } else if i > 0 {
                let prev = self.power(i - 1, j).clone();
                convolve(&self.tree, &prev, len)
            } else {
                let prev = self.power(0, j - 1).clone();
                convolve(&self.cycle, &prev, len)
            };
            self.powers.insert((i, j), p);
        }
        &self.powers[&(i, j)]
    }

    fn cached(g: usize, n: usize) -> Result<Arc<Self>> {
        let cache = W::table_cache();
        if let Some(t) = cache.lock().expect("cache lock").get(&(g, n)) {
            return Ok(Arc::clone(t).downcast::<Self>().expect("table type"));
        }
        let built = Arc::new(Self::build(g, n)?);
        cache
            .lock()
            .expect("cache lock")
            .insert((g, n), Arc::clone(&built) as Arc<dyn Any + Send + Sync>);
        Ok(built)
    }
}

/// Unnormalized count behind the size tables: the number of rooted
/// decompositions of size `n` with the cycle-edge label steps counted by
/// their bound. Exposed for tests.
pub fn bounded_decomposition_count(g: usize, n: usize) -> Result<BigUint> {
    let t = SizeTables::<BigUint>::cached(g, n)?;
    Ok(t.classes.iter().map(|c| c.weight.clone()).sum())
}

/// Splits the contour of a forest with `2σ` trees into its first and last
/// `σ` trees.
fn split_pair(c: &[i64], sigma: usize) -> (Vec<i64>, Vec<i64>) {
    let s = sigma as i64;
    let t = c.iter().position(|&x| x == s).expect("the walk passes σ");
    (c[..=t].iter().map(|x| x - s).collect(), c[t..].to_vec())
}

fn sample_exact_with<W: Weight, R: Rng + ?Sized>(g: usize, n: usize, rng: &mut R) -> Result<WellLabeledGTree> {
    let tables = SizeTables::<W>::cached(g, n)?;
    let schemes = enumerate_schemes(g)?;
    let class_weights: Vec<W> = tables.classes.iter().map(|c| c.weight.clone()).collect();
    loop {
        let class = &tables.classes[W::pick(&class_weights, rng)];
        let plan = &class.plans[rng.random_range(0..class.plans.len())];
        let scheme = &schemes[plan.scheme];
        let sm = scheme.map();

        // Edge sizes, root edge first.
        let mut sizes = vec![0usize; sm.edge_count()];
        let mut rest = n;
        let (mut trees, mut cycles) = (class.trees, class.cycles);
        for (idx, &e) in plan.order.iter().enumerate() {
            let kind = plan.kinds[e];
            if idx + 1 == plan.order.len() {
                sizes[e] = rest;
                break;
            }
            let series = if idx == 0 { tables.root_series(class.root_kind) } else { tables.series(kind).to_vec() };
            if idx > 0 {
                match kind {
                    EdgeKind::Tree => trees -= 1,
                    EdgeKind::Cycle => cycles -= 1,
                }
            }
            let after = &tables.powers[&(trees, cycles)];
            let weights: Vec<W> = (0..=rest).map(|k| series[k].mul(&after[rest - k])).collect();
            let k = W::pick(&weights, rng);
            sizes[e] = k;
            rest -= k;
        }

        // Trees per side, then the forest pairs.
        let mut forests: Vec<Option<Forest>> = vec![None; sm.half_edge_count()];
        let mut u = 0;
        for e in 0..sm.edge_count() {
            let k = sizes[e];
            let weights: Vec<W> = (1..=k).map(|s| W::edge(k, s, plan.kinds[e])).collect();
            let sigma = W::pick(&weights, rng) + 1;
            let c = sample_forest_contour(2 * sigma, k - sigma, rng);
            let (first, second) = split_pair(&c, sigma);
            let (mut a, mut b) = (2 * e, 2 * e + 1);
            if e == sm.root() / 2 {
                let p = rng.random_range(0..2 * k);
                let first_len = first.len() - 1;
                a = sm.root();
                b = opp(a);
                if p < first_len {
                    u = p;
                } else {
                    u = p - first_len;
                    std::mem::swap(&mut a, &mut b);
                }
            }
            forests[a] = Some(Forest::from_contour(&first).expect("split forest"));
            forests[b] = Some(Forest::from_contour(&second).expect("split forest"));
        }
        let shape = TreeDecomposition {
            scheme: scheme.clone(),
            forests: forests.into_iter().map(|f| f.expect("every side")).collect(),
            u,
        };
        if let Some(d) = label_decomposition(&shape, &plan.kinds, rng) {
            return recompose_labeled(&d);
        }
    }
}

/// Uniform well-labelled g-tree with `n` edges, `n ≤ DEFAULT_EXACT_LIMIT`.
pub fn sample_wl_gtree_exact<R: Rng + ?Sized>(g: usize, n: usize, rng: &mut R) -> Result<WellLabeledGTree> {
    sample_wl_gtree_exact_limited(g, n, DEFAULT_EXACT_LIMIT, rng)
}

/// [`sample_wl_gtree_exact`] with an explicit size limit.
pub fn sample_wl_gtree_exact_limited<R: Rng + ?Sized>(
    g: usize,
    n: usize,
    limit: usize,
    rng: &mut R,
) -> Result<WellLabeledGTree> {
    if g > MAX_GENUS {
        return Err(Error::GenusOutOfRange(g));
    }
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    if g == 0 {
        return Ok(sample_labels(&sample_plane_tree(n, rng), rng));
    }
    if n < 2 * g {
        return Err(Error::TooSmall { n, min: 2 * g });
    }
    if n <= BIG_INTEGER_LIMIT {
        sample_exact_with::<BigUint, R>(g, n, rng)
    } else {
        sample_exact_with::<Scaled, R>(g, n, rng)
    }
}

/// Rounds a draw of the limit law of the decomposition sizes to integer
/// sizes summing to `n`; the root side absorbs the rounding residue.
/// Returns `None` when the residue makes the root side negative.
pub fn round_sizes(
    sigma: &[f64],
    m: &[f64],
    root: usize,
    n: usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let scale = (2.0 * n as f64).sqrt();
    let hs = m.len();
    let sig: Vec<usize> = (0..hs).map(|h| ((sigma[h & !1] * scale).round() as usize).max(1)).collect();
    let mut sizes = vec![0usize; hs];
    let mut used: usize = sig.iter().sum::<usize>() / 2;
    for h in (0..hs).filter(|&h| h != root) {
        let x = ((m[h] * 2.0 * n as f64 - sig[h] as f64) / 2.0).round();
        sizes[h] = if x > 0.0 { x as usize } else { 0 };
        used += sizes[h];
    }
    if used > n {
        return None;
    }
    sizes[root] = n - used;
    Some((sig, sizes))
}

/// Approximately uniform well-labelled g-tree with `n` edges: the scheme and
/// the sizes come from a draw of their limit law, rounded to integers; the
/// forests, labels and root offset are uniform given the sizes.
pub fn sample_wl_gtree_asymptotic<R: Rng + ?Sized>(g: usize, n: usize, rng: &mut R) -> Result<WellLabeledGTree> {
    if g > MAX_GENUS {
        return Err(Error::GenusOutOfRange(g));
    }
    if g == 0 {
        return Ok(sample_labels(&sample_plane_tree(n, rng), rng));
    }
    if n < min_size(g, Mode::Asymptotic) {
        return Err(Error::TooSmall { n, min: min_size(g, Mode::Asymptotic) });
    }
    let (scheme, sig, sizes) = loop {
        let mu = crate::continuum::sample_mu::<f64, R>(g, rng)?;
        let root = mu.scheme.map().root();
        if let Some((sig, sizes)) = round_sizes(&mu.sigma, &mu.m, root, n) {
            break (mu.scheme, sig, sizes);
        }
    };
    let sm = scheme.map();
    let forests: Vec<Forest> = (0..sm.half_edge_count()).map(|h| sample_forest(sig[h], sizes[h], rng)).collect();
    let root_len = forests[sm.root()].contour_len();
    let shape = TreeDecomposition { scheme, forests, u: rng.random_range(0..root_len) };
    let kinds = edge_kinds(shape.scheme.map());
    loop {
        if let Some(d) = label_decomposition(&shape, &kinds, rng) {
            return recompose_labeled(&d);
        }
    }
}

/// Uniform bipartite quadrangulation of genus `g` with `n` faces, exact
/// mode; `pointed` keeps the distinguished vertex as the map root's origin
/// is left untouched and the base is returned separately.
pub fn sample_quadrangulation<R: Rng + ?Sized>(
    g: usize,
    n: usize,
    rng: &mut R,
    pointed: bool,
) -> Result<(CombinatorialMap, Option<usize>)> {
    let t = sample_wl_gtree_exact(g, n, rng)?;
    let eps = if rng.random::<bool>() { 1 } else { -1 };
    let pq = cms_forward(&t, eps);
    Ok(if pointed { (pq.map, Some(pq.base)) } else { (pq.map, None) })
}

/// Shuffled copy, for drawing uniform vertex samples.
pub fn shuffled<T: Clone, R: Rng + ?Sized>(xs: &[T], rng: &mut R) -> Vec<T> {
    let mut v = xs.to_vec();
    v.shuffle(rng);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_labeled_gtrees, well_labelings};
    use rand::SeedableRng;

    fn rng(seed: u64) -> crate::Rng {
        crate::Rng::seed_from_u64(seed)
    }

    #[test]
    fn bounded_count_dominates_true_count() {
        for n in 2..=4 {
            let exact = enumerate_labeled_gtrees(1, n).unwrap().len();
            let bound = bounded_decomposition_count(1, n).unwrap();
            assert!(bound >= BigUint::from(exact), "n = {n}");
        }
    }

    #[test]
    fn genus_one_two_edges_is_the_single_tree() {
        let mut r = rng(1);
        for _ in 0..50 {
            let t = sample_wl_gtree_exact(1, 2, &mut r).unwrap();
            assert_eq!(t.tree.word_string(), "a b a b");
            assert_eq!(t.labels, vec![0]);
        }
    }

    #[test]
    fn exact_samples_are_valid() {
        let mut r = rng(2);
        for g in 1..=2 {
            for n in [2 * g, 2 * g + 3, 40, 150] {
                let t = sample_wl_gtree_exact(g, n, &mut r).unwrap();
                assert_eq!(t.genus(), g);
                assert_eq!(t.n(), n);
                t.validate_labels().unwrap();
            }
        }
    }

    #[test]
    fn plane_labels_are_free() {
        let mut r = rng(3);
        let t = sample_plane_tree(30, &mut r);
        let wl = sample_labels(&t, &mut r);
        assert_eq!(wl.tree, t);
        assert_eq!(well_labelings(&GTree::parse_word("a a").unwrap()).len(), 3);
    }

    #[test]
    fn limits_are_enforced() {
        let mut r = rng(4);
        assert_eq!(
            sample_wl_gtree_exact(1, 2001, &mut r),
            Err(Error::TooLarge { n: 2001, limit: DEFAULT_EXACT_LIMIT })
        );
        assert_eq!(sample_wl_gtree_exact(3, 10, &mut r), Err(Error::GenusOutOfRange(3)));
    }

    #[test]
    fn rounding_keeps_the_total() {
        let sigma = [0.3, 0.3, 0.2, 0.2, 0.5, 0.5];
        let m = [0.1, 0.2, 0.15, 0.15, 0.3, 0.1];
        let (sig, sizes) = round_sizes(&sigma, &m, 0, 1000).unwrap();
        let total: usize = sizes.iter().sum::<usize>() + sig.iter().sum::<usize>() / 2;
        assert_eq!(total, 1000);
    }
}
