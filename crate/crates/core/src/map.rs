//! Half-edge representation of maps on orientable surfaces.
//!
//! Half-edges are dense ids `0..2E`. The two halves of edge `k` are `2k` and
//! `2k + 1`, so the opposite of `h` is `h ^ 1` and is never stored.
//! `next[h]` is the counterclockwise successor of `h` around its origin.
//!
//! Faces are the orbits of `h -> next[h ^ 1]`: arrive along `h`, then leave
//! along the half-edge that follows the reverse of `h` around the endpoint.
//! Every facial order in the crate (facial sequences, corners, forests
//! grafted "to the left") is read along this permutation.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opposite half-edge under the `2k <-> 2k + 1` pairing.
#[inline]
pub fn opp(h: usize) -> usize {
    h ^ 1
}

/// A rooted map given by its rotation system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CombinatorialMap {
    next: Vec<usize>,
    root: usize,
    vertex_of: Vec<usize>,
    vertex_rep: Vec<usize>,
}

/// The face cycles of a map, in face-permutation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceDecomposition {
    pub faces: Vec<Vec<usize>>,
    pub face_of: Vec<usize>,
}

/// Checks the three structural invariants of a map given by explicit
/// `opposite` and `next` arrays, reporting the first violation.
pub fn validate(opposite: &[usize], next: &[usize]) -> Result<()> {
    let n = opposite.len();
    if n == 0 || n % 2 == 1 || next.len() != n {
        return Err(Error::NotPermutation(format!(
            "need an even positive half-edge count with matching arrays, got {} and {}",
            n,
            next.len()
        )));
    }
    for (h, &o) in opposite.iter().enumerate() {
        if o >= n || o == h || opposite[o] != h {
            return Err(Error::NotInvolution(h));
        }
    }
    check_permutation(next)?;
    let reached = reachable(opposite, next, 0);
    if reached != n {
        return Err(Error::Disconnected { reached, total: n });
    }
    Ok(())
}

fn check_permutation(p: &[usize]) -> Result<()> {
    let mut seen = vec![false; p.len()];
    for (h, &x) in p.iter().enumerate() {
        if x >= p.len() {
            return Err(Error::NotPermutation(format!("next[{h}] = {x} out of range")));
        }
        if std::mem::replace(&mut seen[x], true) {
            return Err(Error::NotPermutation(format!("{x} has two preimages")));
        }
    }
    Ok(())
}

fn reachable(opposite: &[usize], next: &[usize], start: usize) -> usize {
    let mut seen = vec![false; next.len()];
    let mut stack = vec![start];
    seen[start] = true;
    let mut count = 1;
    while let Some(h) = stack.pop() {
        for x in [opposite[h], next[h]] {
            if !seen[x] {
                seen[x] = true;
                count += 1;
                stack.push(x);
            }
        }
    }
    count
}

impl CombinatorialMap {
    /// Builds a map from its rotation, with opposites implied by the
    /// `2k <-> 2k + 1` pairing.
    pub fn new(next: Vec<usize>, root: usize) -> Result<Self> {
        let n = next.len();
        if n == 0 || n % 2 == 1 {
            return Err(Error::NotPermutation(format!(
                "half-edge count must be even and positive, got {n}"
            )));
        }
        check_permutation(&next)?;
        if root >= n {
            return Err(Error::NotPermutation(format!("root {root} out of range")));
        }
        let opposite: Vec<usize> = (0..n).map(opp).collect();
        let reached = reachable(&opposite, &next, 0);
        if reached != n {
            return Err(Error::Disconnected { reached, total: n });
        }
        Ok(Self::from_valid(next, root))
    }

    /// Builds a map from arbitrary `opposite`/`next` permutations, renaming
    /// half-edges so that opposites pair as `2k <-> 2k + 1`. The root keeps
    /// its identity up to renaming.
    pub fn from_permutations(opposite: &[usize], next: &[usize], root: usize) -> Result<Self> {
        validate(opposite, next)?;
        if root >= next.len() {
            return Err(Error::NotPermutation(format!("root {root} out of range")));
        }
        let n = next.len();
        let mut rename = vec![usize::MAX; n];
        let mut k = 0;
        for h in 0..n {
            if rename[h] == usize::MAX {
                rename[h] = 2 * k;
                rename[opposite[h]] = 2 * k + 1;
                k += 1;
            }
        }
        let mut renamed = vec![0; n];
        for h in 0..n {
            renamed[rename[h]] = rename[next[h]];
        }
        Ok(Self::from_valid(renamed, rename[root]))
    }

    /// Trusted constructor for callers that have already established validity.
    pub(crate) fn from_valid(next: Vec<usize>, root: usize) -> Self {
        let n = next.len();
        let mut vertex_of = vec![usize::MAX; n];
        let mut vertex_rep = Vec::new();
        for h in 0..n {
            if vertex_of[h] != usize::MAX {
                continue;
            }
            let v = vertex_rep.len();
            vertex_rep.push(h);
            let mut x = h;
            loop {
                vertex_of[x] = v;
                x = next[x];
                if x == h {
                    break;
                }
            }
        }
        debug_assert!(root < n);
        Self { next, root, vertex_of, vertex_rep }
    }

    pub fn half_edge_count(&self) -> usize {
        self.next.len()
    }

    pub fn edge_count(&self) -> usize {
        self.next.len() / 2
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn next_at_vertex(&self) -> &[usize] {
        &self.next
    }

    #[inline]
    pub fn next(&self, h: usize) -> usize {
        self.next[h]
    }

    /// The half-edge following `h` along its face.
    #[inline]
    pub fn face_next(&self, h: usize) -> usize {
        self.next[h ^ 1]
    }

    /// Origin vertex of `h`.
    #[inline]
    pub fn vertex_of(&self, h: usize) -> usize {
        self.vertex_of[h]
    }

    /// Endpoint vertex of `h`.
    #[inline]
    pub fn target_of(&self, h: usize) -> usize {
        self.vertex_of[h ^ 1]
    }

    pub fn vertex_ids(&self) -> &[usize] {
        &self.vertex_of
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_rep.len()
    }

    /// The smallest half-edge leaving `v`.
    pub fn vertex_representative(&self, v: usize) -> usize {
        self.vertex_rep[v]
    }

    /// Half-edges leaving `v` in counterclockwise order, starting from its
    /// representative.
    pub fn half_edges_at(&self, v: usize) -> Vec<usize> {
        self.orbit(self.vertex_rep[v])
    }

    /// Rotation orbit of `h`, starting at `h`.
    pub fn orbit(&self, h: usize) -> Vec<usize> {
        let mut out = vec![h];
        let mut x = self.next[h];
        while x != h {
            out.push(x);
            x = self.next[x];
        }
        out
    }

    pub fn degree_of_vertex(&self, v: usize) -> usize {
        self.orbit(self.vertex_rep[v]).len()
    }

    pub fn faces(&self) -> FaceDecomposition {
        let n = self.next.len();
        let mut face_of = vec![usize::MAX; n];
        let mut faces = Vec::new();
        for h in 0..n {
            if face_of[h] != usize::MAX {
                continue;
            }
            let f = faces.len();
            let mut cycle = Vec::new();
            let mut x = h;
            loop {
                face_of[x] = f;
                cycle.push(x);
                x = self.face_next(x);
                if x == h {
                    break;
                }
            }
            faces.push(cycle);
        }
        FaceDecomposition { faces, face_of }
    }

    pub fn face_count(&self) -> usize {
        let n = self.next.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for h in 0..n {
            if seen[h] {
                continue;
            }
            count += 1;
            let mut x = h;
            while !seen[x] {
                seen[x] = true;
                x = self.face_next(x);
            }
        }
        count
    }

    /// Euler characteristic `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn genus(&self) -> usize {
        let chi = self.euler_characteristic();
        debug_assert!(chi <= 2 && (2 - chi) % 2 == 0);
        ((2 - chi) / 2) as usize
    }

    /// Every face has degree 4 and the vertices admit a proper 2-colouring.
    pub fn is_bipartite_quadrangulation(&self) -> bool {
        let faces = self.faces();
        if faces.faces.iter().any(|f| f.len() != 4) {
            return false;
        }
        self.two_colouring().is_some()
    }

    /// Proper 2-colouring of the vertices, if one exists.
    pub fn two_colouring(&self) -> Option<Vec<u8>> {
        let mut colour = vec![u8::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        colour[0] = 0;
        queue.push_back(0);
        while let Some(v) = queue.pop_front() {
            for h in self.half_edges_at(v) {
                let w = self.target_of(h);
                if colour[w] == u8::MAX {
                    colour[w] = 1 - colour[v];
                    queue.push_back(w);
                } else if colour[w] == colour[v] {
                    return None;
                }
            }
        }
        Some(colour)
    }

    /// The same map with a different root half-edge.
    pub fn rerooted(&self, root: usize) -> Self {
        assert!(root < self.next.len());
        Self {
            next: self.next.clone(),
            root,
            vertex_of: self.vertex_of.clone(),
            vertex_rep: self.vertex_rep.clone(),
        }
    }

    /// Canonical relabelling: the root becomes half-edge 0, and half-edges
    /// are numbered in the order a deterministic traversal from the root
    /// first meets them. Two rooted maps are isomorphic exactly when their
    /// canonical forms are equal.
    pub fn canonical(&self) -> Self {
        let (next, _) = self.canonical_with_renaming();
        Self::from_valid(next, 0)
    }

    /// Canonical form together with `rename[old] = new`.
    pub fn canonical_with_renaming(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.next.len();
        let mut rename = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        rename[self.root] = 0;
        rename[self.root ^ 1] = 1;
        order.push(self.root);
        order.push(self.root ^ 1);
        let mut i = 0;
        while i < order.len() {
            let h = order[i];
            let s = self.next[h];
            if rename[s] == usize::MAX {
                let k = order.len();
                rename[s] = k;
                rename[s ^ 1] = k + 1;
                order.push(s);
                order.push(s ^ 1);
            }
            i += 1;
        }
        debug_assert_eq!(order.len(), n);
        let mut next = vec![0; n];
        for h in 0..n {
            next[rename[h]] = rename[self.next[h]];
        }
        (next, rename)
    }

    pub fn to_json(&self) -> MapJson {
        MapJson { half_edges: self.next.len(), next: self.next.clone(), root: self.root }
    }

    pub fn from_json(json: &MapJson) -> Result<Self> {
        if json.half_edges != json.next.len() {
            return Err(Error::Parse(format!(
                "half_edges = {} but next has {} entries",
                json.half_edges,
                json.next.len()
            )));
        }
        Self::new(json.next.clone(), json.root)
    }
}

/// Map file format: `{"half_edges": 2E, "next": [...], "root": r}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub half_edges: usize,
    pub next: Vec<usize>,
    pub root: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge() -> CombinatorialMap {
        CombinatorialMap::new(vec![0, 1], 0).unwrap()
    }

    #[test]
    fn smallest_map_is_valid() {
        assert!(validate(&[1, 0], &[0, 1]).is_ok());
        let m = single_edge();
        assert_eq!(m.vertex_count(), 2);
        assert_eq!(m.genus(), 0);
        let f = m.faces();
        assert_eq!(f.faces.len(), 1);
        assert_eq!(f.faces[0].len(), 2);
        assert!(!m.is_bipartite_quadrangulation());
    }

    #[test]
    fn fixed_point_in_opposite() {
        assert_eq!(validate(&[0, 1], &[0, 1]), Err(Error::NotInvolution(0)));
    }

    #[test]
    fn non_permutation_next() {
        assert!(matches!(validate(&[1, 0], &[0, 0]), Err(Error::NotPermutation(_))));
        assert!(matches!(CombinatorialMap::new(vec![1, 1], 0), Err(Error::NotPermutation(_))));
    }

    #[test]
    fn two_components() {
        let err = validate(&[1, 0, 3, 2], &[0, 1, 2, 3]).unwrap_err();
        assert_eq!(err, Error::Disconnected { reached: 2, total: 4 });
    }

    #[test]
    fn interleaved_square_is_a_torus() {
        // Gluing word a b a b: one vertex with rotation (0 3 1 2).
        let m = CombinatorialMap::new(vec![3, 2, 0, 1], 0).unwrap();
        assert_eq!(m.vertex_count(), 1);
        assert_eq!(m.face_count(), 1);
        assert_eq!(m.faces().faces[0].len(), 4);
        assert_eq!(m.genus(), 1);
    }

    #[test]
    fn two_vertex_four_edge_quadrangulation() {
        // Black vertex owns the even half-edges, white the odd ones, both
        // rotating in increasing order. The two faces are 0 3 4 7 and 2 5 6 1,
        // so the map lives on the torus.
        let mut next = vec![0; 8];
        for (a, b) in [(0, 2), (2, 4), (4, 6), (6, 0), (1, 3), (3, 5), (5, 7), (7, 1)] {
            next[a] = b;
        }
        let m = CombinatorialMap::new(next, 0).unwrap();
        let faces = m.faces();
        assert_eq!(faces.faces, vec![vec![0, 3, 4, 7], vec![1, 2, 5, 6]]);
        assert_eq!(m.genus(), 1);
        assert!(m.is_bipartite_quadrangulation());
    }

    #[test]
    fn loops_are_not_bipartite() {
        let m = CombinatorialMap::new(vec![1, 0], 0).unwrap();
        assert_eq!(m.vertex_count(), 1);
        assert!(m.two_colouring().is_none());
    }

    #[test]
    fn explicit_opposite_is_renamed_to_pairs() {
        // opposite pairs (0,2) and (1,3); next is the identity: a path of two edges
        // would need three vertices; here all four half-edges are separate vertices.
        let m = CombinatorialMap::from_permutations(&[2, 3, 0, 1], &[1, 0, 2, 3], 0).unwrap();
        assert_eq!(m.edge_count(), 2);
        assert_eq!(m.vertex_count(), 3);
        assert_eq!(m.genus(), 0);
    }

    #[test]
    fn canonical_form_forgets_labelling() {
        let m = CombinatorialMap::new(vec![3, 2, 0, 1], 2).unwrap();
        let c = m.canonical();
        assert_eq!(c.root(), 0);
        assert_eq!(c.canonical(), c);
        assert_eq!(c.genus(), m.genus());
    }

    #[test]
    fn json_round_trip() {
        let m = CombinatorialMap::new(vec![3, 2, 0, 1], 1).unwrap();
        let s = serde_json::to_string(&m.to_json()).unwrap();
        assert_eq!(s, r#"{"half_edges":4,"next":[3,2,0,1],"root":1}"#);
        let back = CombinatorialMap::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
