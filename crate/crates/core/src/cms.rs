//! Correspondence between well-labelled g-trees with a sign and pointed
//! bipartite quadrangulations.
//!
//! Forward: every corner of the tree sends an arc to its successor, the next
//! corner (cyclically along the face) carrying a label one smaller; corners
//! with the minimal label send their arc to an extra vertex `v•`. The arcs
//! form the quadrangulation, the tree edges are forgotten.
//!
//! Inverse: labels are distances to `v•`; every face contributes one tree
//! edge, between its two far corners if the face labels read `ℓ, ℓ+1, ℓ, ℓ+1`,
//! and otherwise between the corner labelled `ℓ+2` and the `ℓ+1` corner that
//! precedes it along the face.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::bfs_distances;
use crate::gtree::WellLabeledGTree;
use crate::map::{CombinatorialMap, MapJson};

/// Successor value of corners with the minimal label.
pub const INFINITY: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointedQuadrangulation {
    pub map: CombinatorialMap,
    /// The distinguished vertex `v•`.
    pub base: usize,
    /// -1 when the root points away from `v•`'s side (toward smaller
    /// distance), +1 otherwise.
    pub epsilon: i8,
}

/// JSON form: the map fields plus `base` and `epsilon`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointedQuadrangulationJson {
    #[serde(flatten)]
    pub map: MapJson,
    pub base: usize,
    pub epsilon: i8,
}

impl PointedQuadrangulation {
    /// Builds a pointed quadrangulation, reading the sign off the root.
    pub fn new(map: CombinatorialMap, base: usize) -> Result<Self> {
        if base >= map.vertex_count() {
            return Err(Error::NotBipartiteQuadrangulation(format!("no vertex {base}")));
        }
        if !map.is_bipartite_quadrangulation() {
            return Err(Error::NotBipartiteQuadrangulation(
                "faces must have degree 4 and vertices must be 2-colourable".into(),
            ));
        }
        let d = bfs_distances(&map, base);
        let r = map.root();
        let epsilon = if d[map.vertex_of(r)] > d[map.target_of(r)] { -1 } else { 1 };
        Ok(Self { map, base, epsilon })
    }

    /// Number of faces.
    pub fn n(&self) -> usize {
        self.map.edge_count() / 2
    }

    pub fn genus(&self) -> usize {
        self.map.genus()
    }

    /// Canonical relabelling, carrying the base along.
    pub fn canonical(&self) -> Self {
        let (next, rename) = self.map.canonical_with_renaming();
        let map = CombinatorialMap::from_valid(next, 0);
        let base = map.vertex_of(rename[self.map.vertex_representative(self.base)]);
        Self { map, base, epsilon: self.epsilon }
    }

    pub fn to_json(&self) -> PointedQuadrangulationJson {
        PointedQuadrangulationJson { map: self.map.to_json(), base: self.base, epsilon: self.epsilon }
    }

    pub fn from_json(j: &PointedQuadrangulationJson) -> Result<Self> {
        let map = CombinatorialMap::from_json(&j.map)?;
        let pq = Self::new(map, j.base)?;
        if pq.epsilon != j.epsilon {
            return Err(Error::Parse(format!(
                "epsilon {} disagrees with the root orientation",
                j.epsilon
            )));
        }
        Ok(pq)
    }
}

/// Labels of the corners `0..2n` shifted to have minimum 1.
pub fn corner_labels(t: &WellLabeledGTree) -> Vec<i64> {
    let shifted = t.shifted_labels();
    (0..2 * t.n()).map(|c| shifted[t.tree.tr(c)]).collect()
}

/// Successor of corner `i`: the first later corner, cyclically with corner 0
/// read as position `2n`, whose label is one smaller; [`INFINITY`] for
/// corners labelled 1.
pub fn successor(i: usize, corner_labels: &[i64]) -> usize {
    let len = corner_labels.len();
    let target = corner_labels[i] - 1;
    if target < 1 {
        return INFINITY;
    }
    (1..len).map(|k| (i + k) % len).find(|&k| corner_labels[k] == target).expect("labels are connected")
}

/// Successors of all corners in linear time.
pub fn successors(corner_labels: &[i64]) -> Vec<usize> {
    let len = corner_labels.len();
    let max = *corner_labels.iter().max().expect("nonempty") as usize;
    let mut nearest = vec![INFINITY; max + 2];
    let mut out = vec![INFINITY; len];
    for p in (0..2 * len).rev() {
        let c = p % len;
        let l = corner_labels[c] as usize;
        if p < len && l > 1 {
            out[c] = nearest[l - 1];
        }
        nearest[l] = c;
    }
    out
}

/// Result of the forward map together with the image of each tree vertex.
#[derive(Debug, Clone)]
pub struct ForwardImage {
    pub quadrangulation: PointedQuadrangulation,
    /// Quadrangulation vertex of each tree vertex.
    pub vertex_of_tree_vertex: Vec<usize>,
}

/// The forward bijection, with the output in canonical form.
pub fn cms_forward(t: &WellLabeledGTree, epsilon: i8) -> PointedQuadrangulation {
    cms_forward_image(t, epsilon).quadrangulation
}

pub fn cms_forward_image(t: &WellLabeledGTree, epsilon: i8) -> ForwardImage {
    assert!(epsilon == 1 || epsilon == -1, "epsilon must be ±1");
    let tree = &t.tree;
    let tm = tree.map();
    let len = 2 * tree.n();
    let labels = corner_labels(t);
    let succ = successors(&labels);

    // Arc k leaves corner k as half-edge 2k and lands as 2k + 1.
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); len];
    let mut at_base = Vec::new();
    for (k, &s) in succ.iter().enumerate() {
        if s == INFINITY {
            at_base.push(k);
        } else {
            incoming[s].push(k);
        }
    }
    let mut next = vec![usize::MAX; 2 * len];
    for (c, inc) in incoming.iter_mut().enumerate() {
        // Arcs landing in the same corner: the one drawn from the nearest
        // earlier corner comes first.
        inc.sort_by_key(|&j| (c + len - j) % len);
    }
    for v in 0..tree.vertex_count() {
        let mut rot = Vec::new();
        for x in tm.half_edges_at(v) {
            let c = tree.position(x);
            rot.extend(incoming[c].iter().map(|&j| 2 * j + 1));
            rot.push(2 * c);
        }
        for i in 0..rot.len() {
            next[rot[i]] = rot[(i + 1) % rot.len()];
        }
    }
    // Around v• the arcs appear in decreasing corner order.
    for i in 0..at_base.len() {
        let from = at_base[i];
        let to = at_base[(i + at_base.len() - 1) % at_base.len()];
        next[2 * from + 1] = 2 * to + 1;
    }
    let root = if epsilon == -1 { 0 } else { 1 };
    let raw = CombinatorialMap::from_valid(next, root);
    let (cnext, rename) = raw.canonical_with_renaming();
    let map = CombinatorialMap::from_valid(cnext, 0);
    let base = map.vertex_of(rename[2 * at_base[0] + 1]);
    let vertex_of_tree_vertex = (0..tree.vertex_count())
        .map(|v| map.vertex_of(rename[2 * tree.position(tm.vertex_representative(v))]))
        .collect();
    ForwardImage {
        quadrangulation: PointedQuadrangulation { map, base, epsilon },
        vertex_of_tree_vertex,
    }
}

/// The inverse bijection.
pub fn cms_inverse(pq: &PointedQuadrangulation) -> Result<(WellLabeledGTree, i8)> {
    let q = &pq.map;
    if !q.is_bipartite_quadrangulation() {
        return Err(Error::NotBipartiteQuadrangulation(
            "faces must have degree 4 and vertices must be 2-colourable".into(),
        ));
    }
    let d = bfs_distances(q, pq.base);
    let dist = |h: usize| d[q.vertex_of(h)] as i64;
    // A corner is named by the half-edge leaving it counterclockwise.
    let mut tree_half_edge_at = vec![usize::MAX; q.half_edge_count()];
    for (f, face) in q.faces().faces.iter().enumerate() {
        let l: Vec<i64> = face.iter().map(|&h| dist(h)).collect();
        let top = *l.iter().max().unwrap();
        let tops: Vec<usize> = (0..4).filter(|&i| l[i] == top).collect();
        let (a, b) = if tops.len() == 2 {
            (face[tops[0]], face[tops[1]])
        } else {
            let i = tops[0];
            (face[i], face[(i + 3) % 4])
        };
        tree_half_edge_at[a] = 2 * f;
        tree_half_edge_at[b] = 2 * f + 1;
    }
    let tree_len = q.half_edge_count() / 2;
    let mut next = vec![usize::MAX; tree_len];
    let mut origin_label = vec![0i64; tree_len];
    for v in 0..q.vertex_count() {
        if v == pq.base {
            continue;
        }
        let rot: Vec<usize> = q
            .half_edges_at(v)
            .into_iter()
            .map(|x| tree_half_edge_at[x])
            .filter(|&t| t != usize::MAX)
            .collect();
        for i in 0..rot.len() {
            next[rot[i]] = rot[(i + 1) % rot.len()];
            origin_label[rot[i]] = d[v] as i64;
        }
    }
    let r = q.root();
    let epsilon: i8 = if dist(r) > dist(r ^ 1) { -1 } else { 1 };
    let h0 = if epsilon == -1 { r } else { r ^ 1 };
    let root = tree_half_edge_at[q.next(h0)];
    if root == usize::MAX || next.contains(&usize::MAX) {
        return Err(Error::NotBipartiteQuadrangulation("tree reconstruction failed".into()));
    }
    let tree_map = CombinatorialMap::new(next, root)?;
    let t = WellLabeledGTree::from_map_labels(&tree_map, &origin_label)?;
    Ok((t, epsilon))
}

/// BFS distances from `v•` equal the shifted labels on every tree vertex.
pub fn distance_label_identity(t: &WellLabeledGTree, image: &ForwardImage) -> bool {
    let pq = &image.quadrangulation;
    let d = bfs_distances(&pq.map, pq.base);
    let shifted = t.shifted_labels();
    d[pq.base] == 0
        && image
            .vertex_of_tree_vertex
            .iter()
            .zip(&shifted)
            .all(|(&v, &l)| d[v] as i64 == l)
}

/// A failed instance of the distance bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundViolation {
    pub i: usize,
    pub j: usize,
    pub distance: i64,
    pub bound: i64,
}

/// Minimum of the labels over the cyclic corner interval from `i` to `j`.
pub fn cyclic_min(label_contour: &[i64], i: usize, j: usize) -> i64 {
    let len = label_contour.len() - 1;
    if i <= j {
        label_contour[i..=j].iter().copied().min().unwrap()
    } else {
        let a = label_contour[i..=len].iter().copied().min().unwrap();
        let b = label_contour[0..=j].iter().copied().min().unwrap();
        a.min(b)
    }
}

/// Upper bound on the distance between the images of corners `i` and `j`.
pub fn distance_bound(label_contour: &[i64], i: usize, j: usize) -> i64 {
    let m = cyclic_min(label_contour, i, j).max(cyclic_min(label_contour, j, i));
    label_contour[i] + label_contour[j] - 2 * m + 2
}

/// Checks the bound for corners `i` and `j` given distances from the image
/// of corner `i`.
pub fn check_distance_bound(
    t: &WellLabeledGTree,
    image: &ForwardImage,
    dist_from_i: &[u32],
    i: usize,
    j: usize,
) -> std::result::Result<(), BoundViolation> {
    let lab = t.label_contour();
    let vj = image.vertex_of_tree_vertex[t.tree.tr(j)];
    let distance = dist_from_i[vj] as i64;
    let bound = distance_bound(&lab, i, j);
    if distance <= bound {
        Ok(())
    } else {
        Err(BoundViolation { i, j, distance, bound })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gtree::GTree;

    fn one_edge(child_label: i64) -> WellLabeledGTree {
        let t = GTree::parse_word("a a").unwrap();
        let mut labels = vec![0; 2];
        labels[t.tr(1)] = child_label;
        WellLabeledGTree::new(t, labels).unwrap()
    }

    #[test]
    fn successors_of_one_edge_tree() {
        let t = one_edge(1);
        let lab = corner_labels(&t);
        assert_eq!(successor(0, &lab), INFINITY);
        assert_eq!(successor(1, &lab) % 2, 0);
        assert_eq!(successors(&lab), vec![INFINITY, 0]);
    }

    #[test]
    fn one_edge_image_is_a_doubled_path() {
        let t = one_edge(1);
        let image = cms_forward_image(&t, 1);
        let q = &image.quadrangulation.map;
        assert_eq!(q.vertex_count(), 3);
        assert_eq!(q.edge_count(), 2);
        assert_eq!(q.face_count(), 1);
        assert!(q.is_bipartite_quadrangulation());
        assert!(distance_label_identity(&t, &image));
        let d = bfs_distances(q, image.quadrangulation.base);
        let mut sorted = d.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2]);
    }

    #[test]
    fn round_trip_on_one_edge_trees() {
        for l in -1..=1 {
            let t = one_edge(l);
            for eps in [-1, 1] {
                let pq = cms_forward(&t, eps);
                assert_eq!(cms_inverse(&pq).unwrap(), (t.clone(), eps));
            }
        }
    }

    #[test]
    fn bound_is_trivial_on_the_diagonal() {
        let t = one_edge(1);
        let lab = t.label_contour();
        assert_eq!(distance_bound(&lab, 1, 1), 2);
    }
}
