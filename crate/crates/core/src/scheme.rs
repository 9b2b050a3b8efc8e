//! Schemes of g-trees and the decomposition of a g-tree into a scheme,
//! one forest and one Motzkin path per scheme half-edge, and a root offset.
//!
//! Pruning the leaves of a g-tree repeatedly leaves its core; core vertices
//! of degree at least 3 are the nodes, and the maximal core paths between
//! nodes become the scheme edges. Reading the face of the g-tree, a "piece"
//! starts right after the walk arrives at a node along a core half-edge and
//! ends at the next such arrival. Each piece belongs to one scheme half-edge
//! `e`: its core steps walk the chain `e⁻ = w_0, w_1, ..., w_σ = e⁺`, and the
//! trees it visits form a forest with `σ` trees, tree `j` hanging at `w_{j-1}`.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::enumerate::pairing_words;
use crate::error::{Error, Result};
use crate::forest::{running_min, ContourPair, Forest, MotzkinPath, WellLabeledForest};
use crate::gtree::{GTree, WellLabeledGTree};
use crate::map::{opp, CombinatorialMap};

/// A g-tree without vertices of degree 1 or 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scheme {
    tree: GTree,
}

impl Scheme {
    pub fn new(tree: GTree) -> Result<Self> {
        if tree.genus() == 0 {
            return Err(Error::GenusZero);
        }
        if tree.degrees().iter().any(|&d| d < 3) {
            return Err(Error::IncompatibleQuadruple("scheme has a vertex of degree < 3".into()));
        }
        Ok(Self { tree })
    }

    pub fn tree(&self) -> &GTree {
        &self.tree
    }

    pub fn is_dominant(&self) -> bool {
        is_dominant(&self.tree)
    }
}

/// Every vertex has degree exactly 3.
pub fn is_dominant(tree: &GTree) -> bool {
    tree.degrees().iter().all(|&d| d == 3)
}

/// Unlabelled decomposition: scheme, forest per scheme half-edge, root offset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeDecomposition {
    pub scheme: GTree,
    pub forests: Vec<Forest>,
    pub u: usize,
}

/// Labelled decomposition. Vectors are indexed by scheme half-edge ids
/// (forests, paths) and scheme vertex ids (node labels).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decomposition {
    pub scheme: GTree,
    pub forests: Vec<WellLabeledForest>,
    pub motzkin: Vec<MotzkinPath>,
    /// Node labels relative to the origin of the scheme root.
    pub node_labels: Vec<i64>,
    pub u: usize,
}

struct Piece {
    start: usize,
    len: usize,
    first_core: usize,
    last_core: usize,
}

/// Positions of the core: `core[h]` tells whether half-edge `h` survives
/// repeated leaf pruning.
pub fn core_half_edges(t: &GTree) -> Vec<bool> {
    map_core(t.map())
}

/// [`core_half_edges`] for any map.
pub fn map_core(m: &CombinatorialMap) -> Vec<bool> {
    let mut deg: Vec<usize> = (0..m.vertex_count()).map(|v| m.degree_of_vertex(v)).collect();
    let mut removed = vec![false; m.edge_count()];
    let mut queue: VecDeque<usize> = (0..deg.len()).filter(|&v| deg[v] == 1).collect();
    while let Some(v) = queue.pop_front() {
        if deg[v] != 1 {
            continue;
        }
        let h = m
            .orbit(m.vertex_representative(v))
            .into_iter()
            .find(|&h| !removed[h / 2])
            .expect("a leaf keeps one edge");
        removed[h / 2] = true;
        deg[v] -= 1;
        let w = m.target_of(h);
        deg[w] -= 1;
        if deg[w] == 1 {
            queue.push_back(w);
        }
    }
    (0..m.half_edge_count()).map(|h| !removed[h / 2]).collect()
}

fn node_flags(t: &GTree, core: &[bool]) -> Vec<bool> {
    let m = t.map();
    let mut core_deg = vec![0usize; t.vertex_count()];
    for (h, &c) in core.iter().enumerate() {
        if c {
            core_deg[m.vertex_of(h)] += 1;
        }
    }
    core_deg.iter().map(|&d| d >= 3).collect()
}

fn pieces(t: &GTree) -> Result<(Vec<Piece>, usize)> {
    if t.genus() == 0 {
        return Err(Error::GenusZero);
    }
    let m = t.map();
    let side = t.facial_order();
    let len = side.len();
    let core = core_half_edges(t);
    let node = node_flags(t, &core);
    let starts: Vec<usize> = (0..len)
        .filter(|&p| {
            let h = side[(p + len - 1) % len];
            core[h] && node[m.target_of(h)]
        })
        .collect();
    // The piece containing position 0 comes first.
    let root_idx = if starts[0] == 0 { 0 } else { starts.len() - 1 };
    let u = (len - starts[root_idx]) % len;
    let k = starts.len();
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let a = starts[(root_idx + i) % k];
        let b = starts[(root_idx + i + 1) % k];
        let plen = (b + len - a) % len;
        let plen = if plen == 0 { len } else { plen };
        let cores: Vec<usize> =
            (0..plen).map(|q| side[(a + q) % len]).filter(|&h| core[h]).collect();
        out.push(Piece {
            start: a,
            len: plen,
            first_core: cores[0],
            last_core: *cores.last().unwrap(),
        });
    }
    Ok((out, u))
}

/// Splits a labelled g-tree of positive genus into its decomposition.
pub fn decompose_labeled(t: &WellLabeledGTree) -> Result<Decomposition> {
    let tree = &t.tree;
    let (pieces, u) = pieces(tree)?;
    let m = tree.map();
    let side = tree.facial_order();
    let len = side.len();
    let label_at = |q: usize| t.labels[m.vertex_of(side[q % len])];

    let by_first: HashMap<usize, usize> =
        pieces.iter().enumerate().map(|(i, p)| (p.first_core, i)).collect();
    let word: Vec<usize> = pieces
        .iter()
        .enumerate()
        .map(|(i, p)| i.min(by_first[&opp(p.last_core)]))
        .collect();
    let scheme = GTree::from_gluing_word(&word)?;
    let s_side = scheme.facial_order().to_vec();
    let sm = scheme.map();

    let core = core_half_edges(tree);
    let mut forests = vec![None; s_side.len()];
    let mut motzkin = vec![None; s_side.len()];
    let mut node_labels = vec![0i64; scheme.vertex_count()];
    let base = label_at(pieces[0].start);
    let mut open = vec![false; tree.n()];
    for (k, p) in pieces.iter().enumerate() {
        let h = s_side[k];
        let sigma = (0..p.len).filter(|&q| core[side[(p.start + q) % len]]).count();
        let start_label = label_at(p.start);
        node_labels[sm.vertex_of(h)] = start_label - base;
        let mut c = Vec::with_capacity(p.len + 1);
        let mut l = Vec::with_capacity(p.len + 1);
        let mut mz = vec![0];
        let mut height = sigma as i64;
        let mut floor_label = start_label;
        c.push(height);
        l.push(0);
        for q in 0..p.len {
            let x = side[(p.start + q) % len];
            let next_label = label_at(p.start + q + 1);
            if core[x] {
                height -= 1;
                floor_label = next_label;
                mz.push(next_label - start_label);
            } else if !open[x / 2] {
                open[x / 2] = true;
                height += 1;
            } else {
                open[x / 2] = false;
                height -= 1;
            }
            c.push(height);
            l.push(next_label - floor_label);
        }
        let wf = WellLabeledForest::decode_contour(&ContourPair { c, l })?;
        forests[h] = Some(wf);
        motzkin[h] = Some(MotzkinPath::new(mz)?);
    }
    Ok(Decomposition {
        scheme,
        forests: forests.into_iter().map(|f| f.expect("every half-edge has a piece")).collect(),
        motzkin: motzkin.into_iter().map(|f| f.expect("every half-edge has a piece")).collect(),
        node_labels,
        u,
    })
}

/// The g-tree vertex carried by each scheme vertex of [`decompose`].
pub fn scheme_nodes(t: &GTree) -> Result<Vec<usize>> {
    let flat = WellLabeledGTree { tree: t.clone(), labels: vec![0; t.vertex_count()] };
    let (pieces, _) = pieces(t)?;
    let d = decompose_labeled(&flat)?;
    let sm = d.scheme.map();
    let mut out = vec![usize::MAX; d.scheme.vertex_count()];
    for (k, p) in pieces.iter().enumerate() {
        out[sm.vertex_of(d.scheme.facial_order()[k])] = t.tr(p.start);
    }
    Ok(out)
}

/// Unlabelled decomposition of a g-tree of positive genus.
pub fn decompose(t: &GTree) -> Result<TreeDecomposition> {
    let flat = WellLabeledGTree { tree: t.clone(), labels: vec![0; t.vertex_count()] };
    let d = decompose_labeled(&flat)?;
    Ok(TreeDecomposition {
        scheme: d.scheme,
        forests: d.forests.into_iter().map(|f| f.forest).collect(),
        u: d.u,
    })
}

/// Inverse of [`decompose`].
pub fn recompose(d: &TreeDecomposition) -> Result<GTree> {
    let motzkin = d.forests.iter().map(|f| MotzkinPath::flat(f.tree_count())).collect();
    let full = Decomposition {
        scheme: d.scheme.clone(),
        forests: d.forests.iter().cloned().map(WellLabeledForest::unlabeled).collect(),
        motzkin,
        node_labels: vec![0; d.scheme.vertex_count()],
        u: d.u,
    };
    Ok(recompose_labeled(&full)?.tree)
}

impl Decomposition {
    pub fn sigma(&self, h: usize) -> usize {
        self.forests[h].forest.tree_count()
    }

    pub fn m(&self, h: usize) -> usize {
        self.forests[h].forest.edge_count()
    }

    /// `Σ_e (m^e + σ^e / 2)`, the edge count of the encoded g-tree.
    pub fn size(&self) -> usize {
        let hs = 0..self.forests.len();
        hs.clone().map(|h| self.m(h)).sum::<usize>() + hs.map(|h| self.sigma(h)).sum::<usize>() / 2
    }

    /// Root half-edge of the scheme.
    pub fn root(&self) -> usize {
        self.scheme.map().root()
    }

    /// `l^{e+} - l^{e-}`.
    pub fn label_increment(&self, h: usize) -> i64 {
        let sm = self.scheme.map();
        self.node_labels[sm.target_of(h)] - self.node_labels[sm.vertex_of(h)]
    }

    /// Checks every compatibility condition of the quadruple.
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::IncompatibleQuadruple(s));
        let s = &self.scheme;
        if s.genus() == 0 {
            return Err(Error::GenusZero);
        }
        if s.degrees().iter().any(|&d| d < 3) {
            return bad("scheme has a vertex of degree < 3".into());
        }
        let hs = s.n() * 2;
        if self.forests.len() != hs || self.motzkin.len() != hs {
            return bad("need one forest and one path per scheme half-edge".into());
        }
        if self.node_labels.len() != s.vertex_count() {
            return bad("need one label per scheme node".into());
        }
        if self.node_labels[s.tr(0)] != 0 {
            return bad("root node label must be 0".into());
        }
        for h in 0..hs {
            self.forests[h].validate().or_else(|e| bad(e.to_string()))?;
            let sigma = self.sigma(h);
            if sigma != self.sigma(opp(h)) {
                return bad(format!("half-edges {h} and {} have different lifetimes", opp(h)));
            }
            let p = &self.motzkin[h];
            MotzkinPath::new(p.values.clone())?;
            if p.lifetime() != sigma {
                return bad(format!("path of half-edge {h} has the wrong length"));
            }
            if p.end() != self.label_increment(h) {
                return bad(format!("path of half-edge {h} ends at the wrong label"));
            }
            if self.motzkin[opp(h)] != p.reversed() {
                return bad(format!("paths of half-edges {h} and {} are not reverses", opp(h)));
            }
        }
        if self.u >= self.forests[self.root()].forest.contour_len() {
            return bad(format!("root offset {} out of range", self.u));
        }
        Ok(())
    }

    /// Labels along the piece of half-edge `h`, relative to `e⁻`:
    /// `L(t) + M(σ - running min of C up to t)`.
    pub fn label_contour(&self, h: usize) -> Vec<i64> {
        let cp = self.forests[h].contour_pair();
        let sigma = self.sigma(h) as i64;
        let cmin = running_min(&cp.c);
        let mz = &self.motzkin[h].values;
        cp.l.iter().zip(&cmin).map(|(l, c)| l + mz[(sigma - c) as usize]).collect()
    }

    /// The unlabelled part.
    pub fn shape(&self) -> TreeDecomposition {
        TreeDecomposition {
            scheme: self.scheme.clone(),
            forests: self.forests.iter().map(|f| f.forest.clone()).collect(),
            u: self.u,
        }
    }

    pub fn to_json(&self) -> DecompositionJson {
        let hs = 0..self.forests.len();
        DecompositionJson {
            scheme: self.scheme.gluing_word(),
            m: hs.clone().map(|h| self.m(h)).collect(),
            sigma: hs.clone().map(|h| self.sigma(h)).collect(),
            motzkin: self.motzkin.iter().map(|p| p.values.clone()).collect(),
            forests: self.forests.iter().map(|f| f.contour_pair()).collect(),
            node_labels: self.node_labels.clone(),
            u: self.u,
        }
    }

    pub fn from_json(j: &DecompositionJson) -> Result<Self> {
        let scheme = GTree::from_gluing_word(&j.scheme)?;
        let forests = j
            .forests
            .iter()
            .map(WellLabeledForest::decode_contour)
            .collect::<Result<Vec<_>>>()?;
        for (h, f) in forests.iter().enumerate() {
            if j.m.get(h) != Some(&f.forest.edge_count()) || j.sigma.get(h) != Some(&f.forest.tree_count()) {
                return Err(Error::Parse(format!("sizes of half-edge {h} disagree with its forest")));
            }
        }
        let d = Self {
            scheme,
            forests,
            motzkin: j.motzkin.iter().map(|v| MotzkinPath { values: v.clone() }).collect(),
            node_labels: j.node_labels.clone(),
            u: j.u,
        };
        d.validate()?;
        Ok(d)
    }
}

/// Decomposition file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub scheme: Vec<usize>,
    pub m: Vec<usize>,
    pub sigma: Vec<usize>,
    pub motzkin: Vec<Vec<i64>>,
    pub forests: Vec<ContourPair>,
    pub node_labels: Vec<i64>,
    pub u: usize,
}

/// Inverse of [`decompose_labeled`].
pub fn recompose_labeled(d: &Decomposition) -> Result<WellLabeledGTree> {
    d.validate()?;
    let s = &d.scheme;
    let sm = s.map();
    let edges = s.n();
    let mut offset = vec![0usize; edges + 1];
    for e in 0..edges {
        offset[e + 1] = offset[e] + d.sigma(2 * e);
    }
    let mut next_tree_symbol = offset[edges];
    let total = 2 * d.size();
    let mut word = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for &h in s.facial_order() {
        let c = d.forests[h].forest.contour();
        let lab = d.label_contour(h);
        let base = d.node_labels[sm.vertex_of(h)];
        let sigma = d.sigma(h);
        let e = h / 2;
        let mut stack = Vec::new();
        let mut floor_steps = 0;
        for t in 0..c.len() - 1 {
            labels.push(base + lab[t]);
            if c[t + 1] > c[t] {
                stack.push(next_tree_symbol);
                word.push(next_tree_symbol);
                next_tree_symbol += 1;
            } else if let Some(sym) = stack.pop() {
                word.push(sym);
            } else {
                // Floor step j of h is floor step σ - j + 1 of its reverse.
                let j = if h % 2 == 0 { floor_steps } else { sigma - 1 - floor_steps };
                word.push(offset[e] + j);
                floor_steps += 1;
            }
        }
    }
    word.rotate_left(d.u);
    labels.rotate_left(d.u);
    let tree = GTree::from_gluing_word(&word)?;
    let mut vertex_labels = vec![None; tree.vertex_count()];
    for (q, &l) in labels.iter().enumerate() {
        let v = tree.tr(q);
        match vertex_labels[v] {
            None => vertex_labels[v] = Some(l - labels[0]),
            Some(x) if x != l - labels[0] => {
                return Err(Error::IncompatibleQuadruple("labels disagree at a vertex".into()))
            }
            _ => {}
        }
    }
    WellLabeledGTree::new(tree, vertex_labels.into_iter().map(|l| l.expect("visited")).collect())
}

/// Largest genus accepted by [`enumerate_schemes`].
pub const MAX_SCHEME_GENUS: usize = 2;

/// All rooted schemes of genus `g`, sorted by gluing word.
pub fn enumerate_schemes(g: usize) -> Result<&'static [GTree]> {
    static CACHE: [OnceLock<Vec<GTree>>; MAX_SCHEME_GENUS + 1] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if g == 0 {
        return Err(Error::GenusZero);
    }
    if g > MAX_SCHEME_GENUS {
        return Err(Error::OutOfRange(g));
    }
    Ok(CACHE[g].get_or_init(|| build_schemes(g)))
}

/// Rooted dominant schemes of genus `g`.
pub fn dominant_schemes(g: usize) -> Result<Vec<GTree>> {
    Ok(enumerate_schemes(g)?.iter().filter(|s| is_dominant(s)).cloned().collect())
}

/// Smallest canonical rotation over all rootings: a key for unrooted maps.
pub fn unrooted_key(next: &[usize]) -> Vec<usize> {
    let map = CombinatorialMap::from_valid(next.to_vec(), 0);
    (0..next.len())
        .map(|r| map.rerooted(r).canonical_with_renaming().0)
        .min()
        .expect("nonempty")
}

/// Splits vertex `v` of `map`: the cyclic interval of length `a` starting at
/// rotation index `s` moves to a new vertex joined to `v` by a new edge.
fn split_vertex(map: &CombinatorialMap, v: usize, s: usize, a: usize) -> Vec<usize> {
    let rot = map.half_edges_at(v);
    let d = rot.len();
    let mut next = map.next_at_vertex().to_vec();
    let x = next.len();
    let y = x + 1;
    next.push(0);
    next.push(0);
    let moved: Vec<usize> = (0..a).map(|i| rot[(s + i) % d]).collect();
    let kept: Vec<usize> = (a..d).map(|i| rot[(s + i) % d]).collect();
    for w in moved.windows(2) {
        next[w[0]] = w[1];
    }
    next[*moved.last().unwrap()] = x;
    next[x] = moved[0];
    for w in kept.windows(2) {
        next[w[0]] = w[1];
    }
    next[*kept.last().unwrap()] = y;
    next[y] = kept[0];
    next
}

fn build_schemes(g: usize) -> Vec<GTree> {
    // One-vertex schemes are the one-vertex gluings of a 4g-gon; every other
    // scheme contracts onto one of them along non-loop edges.
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut queue = VecDeque::new();
    for word in pairing_words(2 * g) {
        let t = GTree::from_gluing_word(&word).expect("pairing");
        if t.vertex_count() == 1 {
            let key = unrooted_key(t.map().next_at_vertex());
            if seen.insert(key.clone()) {
                queue.push_back(key);
            }
        }
    }
    let mut all = Vec::new();
    while let Some(key) = queue.pop_front() {
        let map = CombinatorialMap::from_valid(key.clone(), 0);
        for v in 0..map.vertex_count() {
            let d = map.degree_of_vertex(v);
            for s in 0..d {
                for a in 2..=d.saturating_sub(2) {
                    let split = split_vertex(&map, v, s, a);
                    let k = unrooted_key(&split);
                    if seen.insert(k.clone()) {
                        queue.push_back(k);
                    }
                }
            }
        }
        all.push(key);
    }
    let mut words = BTreeSet::new();
    for key in all {
        let map = CombinatorialMap::from_valid(key, 0);
        for r in 0..map.half_edge_count() {
            let (t, _) = GTree::from_map(&map.rerooted(r)).expect("one face");
            words.insert(t.gluing_word());
        }
    }
    words.into_iter().map(|w| GTree::from_gluing_word(&w).expect("word")).collect()
}

/// Number of rooted dominant schemes of genus `g`:
/// `2 (6g-3)! / (12^g g! (3g-2)!)`.
pub fn dominant_scheme_count(g: u32) -> u128 {
    let fact = |n: u32| (1..=n as u128).product::<u128>();
    2 * fact(6 * g - 3) / (12u128.pow(g) * fact(g) * fact(3 * g - 2))
}
