//! Opening dominant g-trees into plane trees with marked triples.
//!
//! Slicing a node splits its rotation into three vertices, one per core
//! half-edge; the new vertex of core half-edge `c` keeps `c` and the
//! half-edges strictly after the previous core half-edge, so the trees
//! grafted before `c` stay with `c`. Half-edge ids never change while
//! slicing or gluing, only the rotation does.
//!
//! A node is intertwined when its three core half-edges, taken in facial
//! order `a, b, c`, appear as `a, c, b` in the rotation. With faces read as
//! `h -> next[opp(h)]` these are exactly the nodes whose slicing leaves a
//! single face, i.e. lowers the genus by one.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{running_min, ContourPair};
use crate::gtree::{GTree, WellLabeledGTree};
use crate::map::CombinatorialMap;
use crate::scheme::{map_core, Decomposition};

/// Facial position of every half-edge, reading the face from the root.
fn facial_positions(m: &CombinatorialMap) -> Vec<usize> {
    let mut pos = vec![usize::MAX; m.half_edge_count()];
    let mut h = m.root();
    for i in 0..m.half_edge_count() {
        pos[h] = i;
        h = m.face_next(h);
    }
    pos
}

/// Core half-edges leaving vertex `v`, in rotation order.
fn core_at(m: &CombinatorialMap, core: &[bool], v: usize) -> Vec<usize> {
    m.half_edges_at(v).into_iter().filter(|&h| core[h]).collect()
}

fn check_dominant(m: &CombinatorialMap, core: &[bool]) -> Result<()> {
    for v in 0..m.vertex_count() {
        if core_at(m, core, v).len() > 3 {
            return Err(Error::NonDominantScheme);
        }
    }
    Ok(())
}

fn intertwined_in(m: &CombinatorialMap, core: &[bool], pos: &[usize], v: usize) -> bool {
    let c = core_at(m, core, v);
    if c.len() != 3 {
        return false;
    }
    let first = (0..3).min_by_key(|&i| pos[c[i]]).unwrap();
    let p = c[(first + 1) % 3];
    let q = c[(first + 2) % 3];
    pos[p] > pos[q]
}

/// Intertwined nodes of a one-face map with dominant scheme.
pub fn intertwined_vertices(m: &CombinatorialMap) -> Result<Vec<usize>> {
    if m.face_count() != 1 {
        return Err(Error::NotOneFace(m.face_count()));
    }
    if m.genus() == 0 {
        return Ok(Vec::new());
    }
    let core = map_core(m);
    check_dominant(m, &core)?;
    let pos = facial_positions(m);
    Ok((0..m.vertex_count()).filter(|&v| intertwined_in(m, &core, &pos, v)).collect())
}

/// Intertwined nodes of a g-tree whose scheme is dominant.
pub fn intertwined_nodes(t: &GTree) -> Result<Vec<usize>> {
    intertwined_vertices(t.map())
}

/// Slices vertex `v`; the result keeps half-edge ids and the root.
pub fn slice_map(m: &CombinatorialMap, v: usize) -> Result<CombinatorialMap> {
    let core = map_core(m);
    let pos = facial_positions(m);
    if m.face_count() != 1 || !intertwined_in(m, &core, &pos, v) {
        return Err(Error::NotIntertwined(v));
    }
    let rot = m.half_edges_at(v);
    let d = rot.len();
    // Start right after a core half-edge so each group ends with one.
    let s = (0..d).find(|&i| core[rot[i]]).unwrap() + 1;
    let mut next = m.next_at_vertex().to_vec();
    let mut group = Vec::new();
    for k in 0..d {
        let h = rot[(s + k) % d];
        group.push(h);
        if core[h] {
            for i in 0..group.len() {
                next[group[i]] = group[(i + 1) % group.len()];
            }
            group.clear();
        }
    }
    let out = CombinatorialMap::from_valid(next, m.root());
    debug_assert_eq!(out.face_count(), 1);
    debug_assert_eq!(out.genus() + 1, m.genus());
    Ok(out)
}

/// Slices node `v` of a g-tree and returns the normalised (g-1)-tree with
/// `rename[old half-edge] = new half-edge`.
pub fn slice(t: &GTree, v: usize) -> Result<(GTree, Vec<usize>)> {
    check_dominant(t.map(), &map_core(t.map()))?;
    GTree::from_map(&slice_map(t.map(), v)?)
}

/// A plane tree with `g` marked triples of vertices and optional labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeWithTriples {
    pub tree: GTree,
    /// Each triple sorted by vertex id.
    pub triples: Vec<[usize; 3]>,
    pub labels: Option<Vec<i64>>,
}

impl TreeWithTriples {
    pub fn genus(&self) -> usize {
        self.triples.len()
    }

    /// Checks distinctness, the degree conditions on the union of paths
    /// between marked vertices, and the label conditions.
    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::InvalidTriples(s.into()));
        if self.tree.genus() != 0 {
            return bad("the underlying tree must be plane");
        }
        let nv = self.tree.vertex_count();
        let mut marked = vec![false; nv];
        for t in &self.triples {
            for &v in t {
                if v >= nv {
                    return bad("vertex out of range");
                }
                if std::mem::replace(&mut marked[v], true) {
                    return bad("marked vertices must be pairwise distinct");
                }
            }
        }
        let (kept, deg) = skeleton(self.tree.map(), &marked);
        for v in 0..nv {
            if deg[v] > 3 {
                return bad("a vertex has degree more than 3 between marked vertices");
            }
            if marked[v] && deg[v] != 1 && !self.triples.is_empty() {
                return bad("marked vertices must be leaves of the union of paths");
            }
        }
        let _ = kept;
        if let Some(labels) = &self.labels {
            if labels.len() != nv {
                return bad("one label per vertex required");
            }
            WellLabeledGTree::new(self.tree.clone(), labels.clone())
                .map_err(|e| Error::InvalidTriples(e.to_string()))?;
            for t in &self.triples {
                if labels[t[0]] != labels[t[1]] || labels[t[1]] != labels[t[2]] {
                    return bad("labels differ inside a triple");
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> TreeWithTriplesJson {
        let order = self.tree.first_visit_order();
        let mut rank = vec![0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        TreeWithTriplesJson {
            word: self.tree.gluing_word(),
            labels: self.labels.as_ref().map(|l| order.iter().map(|&v| l[v]).collect()),
            triples: self.triples.iter().map(|t| t.map(|v| rank[v])).collect(),
        }
    }

    pub fn from_json(j: &TreeWithTriplesJson) -> Result<Self> {
        let tree = GTree::from_gluing_word(&j.word)?;
        let order = tree.first_visit_order();
        let at = |i: usize| {
            order.get(i).copied().ok_or_else(|| Error::InvalidTriples(format!("no vertex {i}")))
        };
        let labels = match &j.labels {
            Some(l) if l.len() == order.len() => {
                let mut out = vec![0; order.len()];
                for (&v, &x) in order.iter().zip(l) {
                    out[v] = x;
                }
                Some(out)
            }
            Some(_) => return Err(Error::InvalidTriples("one label per vertex required".into())),
            None => None,
        };
        let triples = j
            .triples
            .iter()
            .map(|t| {
                let mut v = [at(t[0])?, at(t[1])?, at(t[2])?];
                v.sort_unstable();
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        let w = Self { tree, triples, labels };
        w.validate()?;
        Ok(w)
    }
}

/// JSON form; vertices are indices in first-visit order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeWithTriplesJson {
    pub word: Vec<usize>,
    pub labels: Option<Vec<i64>>,
    pub triples: Vec<[usize; 3]>,
}

/// Prunes unmarked leaves; returns kept half-edges and remaining degrees.
fn skeleton(m: &CombinatorialMap, marked: &[bool]) -> (Vec<bool>, Vec<usize>) {
    let mut deg: Vec<usize> = (0..m.vertex_count()).map(|v| m.degree_of_vertex(v)).collect();
    let mut removed = vec![false; m.edge_count()];
    let mut queue: VecDeque<usize> =
        (0..deg.len()).filter(|&v| deg[v] == 1 && !marked[v]).collect();
    while let Some(v) = queue.pop_front() {
        if deg[v] != 1 {
            continue;
        }
        let h = m.orbit(m.vertex_representative(v)).into_iter().find(|&h| !removed[h / 2]).unwrap();
        removed[h / 2] = true;
        deg[v] -= 1;
        let w = m.target_of(h);
        deg[w] -= 1;
        if deg[w] == 1 && !marked[w] {
            queue.push_back(w);
        }
    }
    ((0..m.half_edge_count()).map(|h| !removed[h / 2]).collect(), deg)
}

/// Opens a labelled dominant g-tree along `sequence = (v_1, ..., v_g)`
/// (vertex ids of `t`); `v_g` is sliced first.
pub fn open(t: &WellLabeledGTree, sequence: &[usize]) -> Result<TreeWithTriples> {
    let g = t.genus();
    if sequence.len() != g {
        return Err(Error::InvalidOpeningSequence(format!(
            "need {g} nodes, got {}",
            sequence.len()
        )));
    }
    let tm = t.tree.map();
    check_dominant(tm, &map_core(tm))?;
    let mut m = tm.clone();
    let mut cut = vec![[0usize; 3]; g];
    for i in (0..g).rev() {
        let v0 = sequence[i];
        if v0 >= tm.vertex_count() {
            return Err(Error::InvalidOpeningSequence(format!("no vertex {v0}")));
        }
        let v = m.vertex_of(tm.vertex_representative(v0));
        let core = map_core(&m);
        let c = core_at(&m, &core, v);
        m = slice_map(&m, v).map_err(|_| {
            Error::InvalidOpeningSequence(format!("vertex {v0} is not intertwined at its stage"))
        })?;
        cut[i] = [c[0], c[1], c[2]];
    }
    let (tree, rename) = GTree::from_map(&m)?;
    let tmap = tree.map();
    let mut labels = vec![0; tree.vertex_count()];
    for h in 0..tm.half_edge_count() {
        labels[tmap.vertex_of(rename[h])] = t.labels[tm.vertex_of(h)];
    }
    let triples = cut
        .iter()
        .map(|c| {
            let mut v = c.map(|h| tmap.vertex_of(rename[h]));
            v.sort_unstable();
            v
        })
        .collect();
    let w = TreeWithTriples { tree, triples, labels: Some(labels) };
    debug_assert!(w.validate().is_ok());
    Ok(w)
}

/// Glues the triples back (first triple first) and returns the g-tree with
/// its opening sequence.
pub fn glue(w: &TreeWithTriples) -> Result<(WellLabeledGTree, Vec<usize>)> {
    w.validate()?;
    let pm = w.tree.map();
    let mut marked = vec![false; pm.vertex_count()];
    for t in &w.triples {
        for &v in t {
            marked[v] = true;
        }
    }
    let (kept, _) = skeleton(pm, &marked);
    let cut_of = |v: usize| pm.orbit(pm.vertex_representative(v)).into_iter().find(|&h| kept[h]).unwrap();
    let mut m = pm.clone();
    for t in &w.triples {
        let cuts = t.map(cut_of);
        // Rotation of each vertex, ending with its cut half-edge.
        let rots: Vec<Vec<usize>> = cuts.iter().map(|&c| m.orbit(m.next(c))).collect();
        let mut found = None;
        for order in [[0, 1, 2], [0, 2, 1]] {
            let merged: Vec<usize> = order.iter().flat_map(|&k| rots[k].iter().copied()).collect();
            let mut next = m.next_at_vertex().to_vec();
            for i in 0..merged.len() {
                next[merged[i]] = merged[(i + 1) % merged.len()];
            }
            let cand = CombinatorialMap::from_valid(next, m.root());
            if cand.face_count() == 1 {
                if found.is_some() {
                    return Err(Error::InvalidTriples("both gluings keep one face".into()));
                }
                found = Some(cand);
            }
        }
        m = found.ok_or_else(|| Error::InvalidTriples("no gluing keeps one face".into()))?;
    }
    let origin_label: Vec<i64> = match &w.labels {
        Some(l) => (0..pm.half_edge_count()).map(|h| l[pm.vertex_of(h)]).collect(),
        None => vec![0; pm.half_edge_count()],
    };
    let t = WellLabeledGTree::from_map_labels(&m, &origin_label)?;
    let (_, rename) = GTree::from_map(&m)?;
    let seq = w
        .triples
        .iter()
        .map(|tr| t.tree.map().vertex_of(rename[cut_of(tr[0])]))
        .collect();
    Ok((t, seq))
}

/// Every valid opening sequence, in a fixed order: at each stage the
/// intertwined nodes are taken by increasing vertex id of the input tree.
pub fn opening_sequences(t: &GTree) -> Result<Vec<Vec<usize>>> {
    let tm = t.map();
    check_dominant(tm, &map_core(tm))?;
    let g = t.genus();
    let mut out = Vec::new();
    fn rec(
        tm: &CombinatorialMap,
        m: &CombinatorialMap,
        stage: usize,
        seq: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if stage == 0 {
            let mut s = seq.clone();
            s.reverse();
            out.push(s);
            return Ok(());
        }
        let nodes = intertwined_vertices(m)?;
        if nodes.len() != 2 * stage {
            return Err(Error::InvalidOpeningSequence(format!(
                "{} intertwined nodes at genus {stage}",
                nodes.len()
            )));
        }
        let mut originals: Vec<usize> = nodes
            .iter()
            .map(|&v| tm.vertex_of(m.vertex_representative(v)))
            .collect();
        originals.sort_unstable();
        for v0 in originals {
            let v = m.vertex_of(tm.vertex_representative(v0));
            let sliced = slice_map(m, v)?;
            seq.push(v0);
            rec(tm, &sliced, stage - 1, seq, out)?;
            seq.pop();
        }
        Ok(())
    }
    rec(tm, tm, g, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// Number of intertwined nodes at every stage of the opening along `sequence`.
pub fn intertwined_counts_along(t: &GTree, sequence: &[usize]) -> Result<Vec<usize>> {
    let tm = t.map();
    let mut m = tm.clone();
    let mut counts = vec![intertwined_vertices(&m)?.len()];
    for &v0 in sequence.iter().rev() {
        m = slice_map(&m, m.vertex_of(tm.vertex_representative(v0)))?;
        counts.push(intertwined_vertices(&m)?.len());
    }
    Ok(counts)
}

/// Height contour of a plane tree: depth of `tr(i)` for `i = 0..=2n`.
pub fn plane_contour(t: &GTree) -> Vec<i64> {
    let mut seen = vec![false; t.n()];
    let mut c = Vec::with_capacity(2 * t.n() + 1);
    let mut h = 0i64;
    c.push(0);
    for &x in t.facial_order() {
        h += if std::mem::replace(&mut seen[x / 2], true) { -1 } else { 1 };
        c.push(h);
    }
    c
}

/// Contour pair of an opened labelled tree computed directly.
pub fn opened_contour_direct(w: &TreeWithTriples) -> ContourPair {
    let labels = w.labels.clone().unwrap_or_else(|| vec![0; w.tree.vertex_count()]);
    ContourPair {
        c: plane_contour(&w.tree),
        l: w.tree.facial_sequence().iter().map(|&v| labels[v]).collect(),
    }
}

/// Concatenates pieces by increments, starting from 0.
fn concat(out: &mut Vec<i64>, piece: &[i64]) {
    for w in piece.windows(2) {
        let last = *out.last().unwrap();
        out.push(last + w[1] - w[0]);
    }
}

/// `f(s) - 2 inf_{[0,s]} f` on `f` restricted to `[a, b]`, plus `f(a)`.
fn going_up(f: &[i64], a: usize, b: usize) -> Vec<i64> {
    let mut inf = i64::MAX;
    (a..=b)
        .map(|s| {
            inf = inf.min(f[s]);
            f[s] - 2 * inf + f[a]
        })
        .collect()
}

/// Contour pair of the opened tree assembled from the decomposition pieces:
/// forests first visited in the opened scheme are read with the floor going
/// up, the others with the floor going down, and the two root forests are
/// split at the root offset and at the matching floor time.
///
/// `scheme_opening` lists scheme vertex ids `(s_1, ..., s_g)`.
pub fn opened_contour_via_formulas(
    d: &Decomposition,
    scheme_opening: &[usize],
) -> Result<ContourPair> {
    let sm = d.scheme.map();
    check_dominant(sm, &map_core(sm))?;
    if !crate::scheme::is_dominant(&d.scheme) {
        return Err(Error::NonDominantScheme);
    }
    let mut opened = sm.clone();
    for &v in scheme_opening.iter().rev() {
        opened = slice_map(&opened, opened.vertex_of(sm.vertex_representative(v)))
            .map_err(|_| Error::InvalidOpeningSequence(format!("scheme vertex {v}")))?;
    }
    let root = sm.root();
    let root_bar = root ^ 1;
    let cc: Vec<Vec<i64>> = (0..d.forests.len())
        .map(|h| {
            let sigma = d.sigma(h) as i64;
            d.forests[h].forest.contour().iter().map(|c| c - sigma).collect()
        })
        .collect();
    let lab: Vec<Vec<i64>> = (0..d.forests.len()).map(|h| d.label_contour(h)).collect();

    let u = d.u;
    let croot = &cc[root];
    let run = running_min(croot);
    let sigma_root = d.sigma(root) as i64;
    let x = (0..=u).find(|&s| croot[s] == run[u]).unwrap();
    let cbar = &cc[root_bar];
    let y = cbar
        .iter()
        .position(|&c| c == -sigma_root - run[u])
        .ok_or_else(|| Error::MalformedContour("split time of the reverse root forest".into()))?;

    let mut c_out = vec![0i64];
    let mut l_out = vec![0i64];
    // First visit of the root forest, from u to its end, floor going up.
    concat(&mut c_out, &going_up(croot, u, croot.len() - 1));
    concat(&mut l_out, &lab[root][u..]);

    let mut seen = vec![false; d.forests.len() / 2];
    let mut h = opened.face_next(root);
    while h != root {
        let first = !std::mem::replace(&mut seen[h / 2], true);
        let f = &cc[h];
        if h == root_bar {
            concat(&mut c_out, &f[..=y]);
            concat(&mut c_out, &going_up(f, y, f.len() - 1));
        } else if first {
            concat(&mut c_out, &going_up(f, 0, f.len() - 1));
        } else {
            concat(&mut c_out, f);
        }
        concat(&mut l_out, &lab[h]);
        h = opened.face_next(h);
    }
    // Last visit of the root forest: floor going down up to x, then the part
    // of the tree holding the root.
    concat(&mut c_out, &croot[..=x]);
    let tail: Vec<i64> = (x..=u)
        .map(|s| croot[s] - 2 * croot[s..=u].iter().copied().min().unwrap() + run[u])
        .collect();
    concat(&mut c_out, &tail);
    concat(&mut l_out, &lab[root][..=u]);
    Ok(ContourPair { c: c_out, l: l_out })
}
