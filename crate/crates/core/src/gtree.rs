//! One-face maps (g-trees) and their integer labellings.
//!
//! A g-tree is stored in "word form": its unique face is read from the root,
//! the i-th half-edge of that walk is called side `i`, and edges are numbered
//! by first occurrence, so side `i` is half-edge `2k` if it is the first visit
//! of edge `k` and `2k + 1` otherwise. Two rooted g-trees are isomorphic
//! exactly when they have the same gluing word.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{opp, CombinatorialMap};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GTree {
    map: CombinatorialMap,
    side: Vec<usize>,
    pos: Vec<usize>,
}

impl GTree {
    /// Glues the sides of a `2n`-gon according to `word`: equal symbols are
    /// identified, and the polygon boundary becomes the face of the result.
    /// Side 0 is the root.
    pub fn from_gluing_word<T: Eq + Hash + Clone>(word: &[T]) -> Result<Self> {
        let canonical = canonical_word(word)?;
        Ok(Self::from_canonical_word(&canonical))
    }

    /// Parses a whitespace-separated gluing word.
    pub fn parse_word(text: &str) -> Result<Self> {
        let symbols: Vec<&str> = text.split_whitespace().collect();
        Self::from_gluing_word(&symbols)
    }

    fn from_canonical_word(word: &[usize]) -> Self {
        let len = word.len();
        let mut seen = vec![false; len / 2];
        let mut side = Vec::with_capacity(len);
        for &s in word {
            side.push(if std::mem::replace(&mut seen[s], true) { 2 * s + 1 } else { 2 * s });
        }
        let mut pos = vec![0; len];
        for (i, &h) in side.iter().enumerate() {
            pos[h] = i;
        }
        // The face permutation sends side i to side i + 1, and
        // face_next(h) = next[opp(h)], hence next[y] = side[pos[opp(y)] + 1].
        let next: Vec<usize> = (0..len).map(|y| side[(pos[opp(y)] + 1) % len]).collect();
        let map = CombinatorialMap::from_valid(next, 0);
        Self { map, side, pos }
    }

    /// Rebuilds a g-tree from any rooted one-face map. Returns the tree and
    /// `rename[old half-edge] = new half-edge`.
    pub fn from_map(map: &CombinatorialMap) -> Result<(Self, Vec<usize>)> {
        let faces = map.face_count();
        if faces != 1 {
            return Err(Error::NotOneFace(faces));
        }
        let len = map.half_edge_count();
        let mut walk = Vec::with_capacity(len);
        let mut h = map.root();
        for _ in 0..len {
            walk.push(h);
            h = map.face_next(h);
        }
        let word: Vec<usize> = walk.iter().map(|&h| h / 2).collect();
        let tree = Self::from_gluing_word(&word)?;
        let mut rename = vec![0; len];
        for (i, &h) in walk.iter().enumerate() {
            rename[h] = tree.side[i];
        }
        Ok((tree, rename))
    }

    pub fn map(&self) -> &CombinatorialMap {
        &self.map
    }

    /// Number of edges.
    pub fn n(&self) -> usize {
        self.side.len() / 2
    }

    pub fn genus(&self) -> usize {
        self.map.genus()
    }

    pub fn vertex_count(&self) -> usize {
        self.map.vertex_count()
    }

    /// Half-edges in facial order starting from the root: entry `i` is the
    /// half-edge traversed at step `i + 1` of the face walk.
    pub fn facial_order(&self) -> &[usize] {
        &self.side
    }

    /// Position of a half-edge in the facial order.
    pub fn position(&self, h: usize) -> usize {
        self.pos[h]
    }

    /// Vertex visited at step `i` of the face walk, for `0 <= i <= 2n`.
    pub fn tr(&self, i: usize) -> usize {
        let len = self.side.len();
        self.map.vertex_of(self.side[i % len])
    }

    /// The facial sequence `tr(0), ..., tr(2n)`.
    pub fn facial_sequence(&self) -> Vec<usize> {
        (0..=self.side.len()).map(|i| self.tr(i)).collect()
    }

    /// Gluing word with symbols numbered by first occurrence.
    pub fn gluing_word(&self) -> Vec<usize> {
        self.side.iter().map(|&h| h / 2).collect()
    }

    pub fn word_string(&self) -> String {
        self.gluing_word().iter().map(|s| symbol_name(*s)).collect::<Vec<_>>().join(" ")
    }

    /// Vertices in order of first appearance along the facial sequence.
    pub fn first_visit_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.vertex_count()];
        let mut order = Vec::with_capacity(self.vertex_count());
        for i in 0..self.side.len() {
            let v = self.tr(i);
            if !std::mem::replace(&mut seen[v], true) {
                order.push(v);
            }
        }
        order
    }

    /// Degrees of all vertices.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count()];
        for h in 0..self.side.len() {
            deg[self.map.vertex_of(h)] += 1;
        }
        deg
    }

    /// The same tree rerooted at half-edge `h`, with `rename` as in [`GTree::from_map`].
    pub fn rerooted(&self, h: usize) -> (Self, Vec<usize>) {
        Self::from_map(&self.map.rerooted(h)).expect("rerooting keeps one face")
    }
}

/// Letters for small symbol indices, numbers beyond.
pub fn symbol_name(s: usize) -> String {
    if s < 26 {
        ((b'a' + s as u8) as char).to_string()
    } else {
        format!("s{s}")
    }
}

/// Renames the symbols of a gluing word by order of first occurrence,
/// checking that every symbol appears exactly twice.
pub fn canonical_word<T: Eq + Hash + Clone>(word: &[T]) -> Result<Vec<usize>> {
    if word.is_empty() {
        return Err(Error::BadWord("empty word".into()));
    }
    let mut ids: HashMap<T, usize> = HashMap::new();
    let mut counts = Vec::new();
    let mut out = Vec::with_capacity(word.len());
    for s in word {
        let next_id = ids.len();
        let id = *ids.entry(s.clone()).or_insert(next_id);
        if id == counts.len() {
            counts.push(0);
        }
        counts[id] += 1;
        if counts[id] > 2 {
            return Err(Error::BadWord(format!("symbol #{id} appears more than twice")));
        }
        out.push(id);
    }
    if let Some(id) = counts.iter().position(|&c| c != 2) {
        return Err(Error::BadWord(format!("symbol #{id} appears once")));
    }
    Ok(out)
}

/// A g-tree with integer labels on its vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WellLabeledGTree {
    pub tree: GTree,
    /// Label per vertex id of `tree.map()`.
    pub labels: Vec<i64>,
}

impl WellLabeledGTree {
    pub fn new(tree: GTree, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != tree.vertex_count() {
            return Err(Error::Parse(format!(
                "{} labels for {} vertices",
                labels.len(),
                tree.vertex_count()
            )));
        }
        let t = Self { tree, labels };
        t.validate_labels()?;
        Ok(t)
    }

    /// Builds a labelled g-tree from a rooted one-face map and one label per
    /// half-edge origin. Labels are shifted so that the root origin gets 0.
    pub fn from_map_labels(map: &CombinatorialMap, origin_label: &[i64]) -> Result<Self> {
        let (tree, rename) = GTree::from_map(map)?;
        let base = origin_label[map.root()];
        let mut labels = vec![0; tree.vertex_count()];
        for (old, &new) in rename.iter().enumerate() {
            labels[tree.map().vertex_of(new)] = origin_label[old] - base;
        }
        Self::new(tree, labels)
    }

    /// Checks the root label and the edge constraint.
    pub fn validate_labels(&self) -> Result<()> {
        let root = self.labels[self.tree.tr(0)];
        if root != 0 {
            return Err(Error::RootLabelNonzero(root));
        }
        let m = self.tree.map();
        for e in 0..self.tree.n() {
            let jump = self.labels[m.vertex_of(2 * e)] - self.labels[m.vertex_of(2 * e + 1)];
            if jump.abs() > 1 {
                return Err(Error::EdgeJumpTooLarge { edge: e, jump });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    pub fn genus(&self) -> usize {
        self.tree.genus()
    }

    /// Label of `tr(i)` for `i = 0..=2n`: the spatial contour.
    pub fn label_contour(&self) -> Vec<i64> {
        (0..=2 * self.n()).map(|i| self.labels[self.tree.tr(i)]).collect()
    }

    /// Labels shifted so that the minimum becomes 1.
    pub fn shifted_labels(&self) -> Vec<i64> {
        let min = *self.labels.iter().min().expect("nonempty");
        self.labels.iter().map(|l| l - min + 1).collect()
    }

    /// Text form: gluing word on the first line, labels in first-visit
    /// order on the second.
    pub fn to_text(&self) -> String {
        let labels: Vec<String> =
            self.tree.first_visit_order().iter().map(|&v| self.labels[v].to_string()).collect();
        format!("{}\n{}\n", self.tree.word_string(), labels.join(" "))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let word = lines.next().ok_or_else(|| Error::Parse("missing gluing word".into()))?;
        let tree = GTree::parse_word(word)?;
        let labels = match lines.next() {
            Some(line) => line
                .split_whitespace()
                .map(|s| s.parse::<i64>().map_err(|e| Error::Parse(e.to_string())))
                .collect::<Result<Vec<_>>>()?,
            None => return Err(Error::Parse("missing label line".into())),
        };
        Self::from_first_visit_labels(tree, &labels)
    }

    pub fn from_first_visit_labels(tree: GTree, ordered: &[i64]) -> Result<Self> {
        let order = tree.first_visit_order();
        if ordered.len() != order.len() {
            return Err(Error::Parse(format!(
                "{} labels for {} vertices",
                ordered.len(),
                order.len()
            )));
        }
        let mut labels = vec![0; order.len()];
        for (&v, &l) in order.iter().zip(ordered) {
            labels[v] = l;
        }
        Self::new(tree, labels)
    }

    pub fn to_json(&self) -> GTreeJson {
        GTreeJson {
            word: self.tree.gluing_word(),
            labels: self.tree.first_visit_order().iter().map(|&v| self.labels[v]).collect(),
        }
    }

    pub fn from_json(json: &GTreeJson) -> Result<Self> {
        let tree = GTree::from_gluing_word(&json.word)?;
        if tree.gluing_word() != json.word {
            return Err(Error::BadWord("symbols must be numbered by first occurrence".into()));
        }
        Self::from_first_visit_labels(tree, &json.labels)
    }
}

/// JSON form of a labelled g-tree; labels are listed in first-visit order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GTreeJson {
    pub word: Vec<usize>,
    pub labels: Vec<i64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_tree() {
        let t = GTree::parse_word("a a").unwrap();
        assert_eq!(t.n(), 1);
        assert_eq!(t.genus(), 0);
        let s = t.facial_sequence();
        assert_eq!(s.len(), 3);
        assert_eq!(s[0], s[2]);
        assert_ne!(s[0], s[1]);
    }

    #[test]
    fn interleaved_word_has_genus_one() {
        let t = GTree::parse_word("a b a b").unwrap();
        assert_eq!(t.genus(), 1);
        assert_eq!(t.vertex_count(), 1);
        assert_eq!(t.facial_sequence(), vec![0; 5]);
    }

    #[test]
    fn nested_and_sequential_words_are_planar() {
        for w in ["a a b b", "a b b a"] {
            let t = GTree::parse_word(w).unwrap();
            assert_eq!(t.genus(), 0, "{w}");
            assert_eq!(t.vertex_count(), 3);
        }
    }

    #[test]
    fn path_rooted_at_an_end() {
        // Root leaves an end of the path, walks to the far end and back.
        let t = GTree::parse_word("a b b a").unwrap();
        let s = t.facial_sequence();
        let (r, m, l) = (s[0], s[1], s[2]);
        assert_eq!(s, vec![r, m, l, m, r]);
        assert!(r != m && m != l && r != l);
    }

    #[test]
    fn eight_gon_with_antipodal_pairing() {
        let t = GTree::parse_word("a b c d a b c d").unwrap();
        assert_eq!(t.genus(), 2);
    }

    #[test]
    fn bad_words() {
        assert!(matches!(GTree::parse_word("a a a"), Err(Error::BadWord(_))));
        assert!(matches!(GTree::parse_word("a b a"), Err(Error::BadWord(_))));
        assert!(matches!(GTree::parse_word(""), Err(Error::BadWord(_))));
    }

    #[test]
    fn from_map_round_trip() {
        let t = GTree::parse_word("a b c a d c b d").unwrap();
        for h in 0..2 * t.n() {
            let (r, rename) = t.rerooted(h);
            assert_eq!(r.map().root(), 0);
            assert_eq!(rename[h], 0);
            assert_eq!(r.genus(), t.genus());
            let (back, _) = r.rerooted(rename[0]);
            assert_eq!(back, t);
        }
    }

    #[test]
    fn label_validation() {
        let t = GTree::parse_word("a a").unwrap();
        let root = t.tr(0);
        let other = t.tr(1);
        let mut labels = vec![0; 2];
        labels[other] = 1;
        assert!(WellLabeledGTree::new(t.clone(), labels.clone()).is_ok());
        labels[other] = 2;
        assert_eq!(
            WellLabeledGTree::new(t.clone(), labels.clone()),
            Err(Error::EdgeJumpTooLarge { edge: 0, jump: if root == 0 { -2 } else { 2 } })
        );
        labels[root] = 1;
        labels[other] = 0;
        assert_eq!(WellLabeledGTree::new(t, labels), Err(Error::RootLabelNonzero(1)));
    }

    #[test]
    fn text_and_json_round_trip() {
        let t = GTree::parse_word("a b b c c a").unwrap();
        let order = t.first_visit_order();
        let wl = WellLabeledGTree::from_first_visit_labels(t, &[0, 1, 0, 1][..order.len()]).unwrap();
        let back = WellLabeledGTree::from_text(&wl.to_text()).unwrap();
        assert_eq!(back, wl);
        let json = serde_json::to_string(&wl.to_json()).unwrap();
        let back = WellLabeledGTree::from_json(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, wl);
    }
}
