//! Exhaustive enumeration of small objects, used as test oracles.

use crate::error::{Error, Result};
use crate::gtree::{GTree, WellLabeledGTree};
use crate::map::CombinatorialMap;

/// Largest edge count accepted by the polygon-pairing enumerators.
pub const MAX_PAIRING_N: usize = 8;

/// Largest face count accepted by the quadrangulation enumerator.
pub const MAX_QUADRANGULATION_N: usize = 4;

/// All gluing words of a `2n`-gon with symbols numbered by first occurrence:
/// one word per pairing of the sides, `(2n - 1)!!` in total.
pub fn pairing_words(n: usize) -> Vec<Vec<usize>> {
    fn rec(word: &mut Vec<usize>, next_symbol: usize, out: &mut Vec<Vec<usize>>) {
        let Some(i) = word.iter().position(|&s| s == usize::MAX) else {
            out.push(word.clone());
            return;
        };
        word[i] = next_symbol;
        for j in i + 1..word.len() {
            if word[j] == usize::MAX {
                word[j] = next_symbol;
                rec(word, next_symbol + 1, out);
                word[j] = usize::MAX;
            }
        }
        word[i] = usize::MAX;
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(&mut vec![usize::MAX; 2 * n], 0, &mut out);
    }
    out
}

fn guard(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    Ok(())
}

/// All rooted g-trees with `n` edges.
pub fn enumerate_gtrees(g: usize, n: usize) -> Result<Vec<GTree>> {
    guard(n, MAX_PAIRING_N)?;
    Ok(pairing_words(n)
        .into_iter()
        .map(|w| GTree::from_gluing_word(&w).expect("pairing"))
        .filter(|t| t.genus() == g)
        .collect())
}

/// All labellings of `t` with root label 0 and jumps of at most 1.
pub fn well_labelings(t: &GTree) -> Vec<WellLabeledGTree> {
    let m = t.map();
    let order = t.first_visit_order();
    let nv = order.len();
    // Assign labels along a spanning tree: each vertex after the root is
    // reached from an earlier one along some edge.
    let mut rank = vec![0; nv];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    let mut parent = vec![usize::MAX; nv];
    for h in 0..m.half_edge_count() {
        let (a, b) = (m.vertex_of(h), m.target_of(h));
        if rank[a] < rank[b] && (parent[b] == usize::MAX || rank[parent[b]] > rank[a]) {
            parent[b] = a;
        }
    }
    let mut out = Vec::new();
    let mut labels = vec![0i64; nv];
    fn rec(
        i: usize,
        order: &[usize],
        parent: &[usize],
        labels: &mut [i64],
        t: &GTree,
        out: &mut Vec<WellLabeledGTree>,
    ) {
        if i == order.len() {
            if let Ok(wl) = WellLabeledGTree::new(t.clone(), labels.to_vec()) {
                out.push(wl);
            }
            return;
        }
        let v = order[i];
        for d in -1..=1 {
            labels[v] = labels[parent[v]] + d;
            rec(i + 1, order, parent, labels, t, out);
        }
    }
    labels[order[0]] = 0;
    rec(1, &order, &parent, &mut labels, t, &mut out);
    out
}

/// All well-labelled g-trees with `n` edges.
pub fn enumerate_labeled_gtrees(g: usize, n: usize) -> Result<Vec<WellLabeledGTree>> {
    Ok(enumerate_gtrees(g, n)?.iter().flat_map(well_labelings).collect())
}

/// All rooted maps with `edges` edges whose faces all have degree 4, in
/// canonical form. Generation follows the canonical labelling order, so
/// every rooted map is produced exactly once.
pub fn enumerate_rooted_quadrangular_maps(edges: usize) -> Vec<CombinatorialMap> {
    struct State {
        next: Vec<usize>,
        prev: Vec<usize>,
        count: usize,
        out: Vec<CombinatorialMap>,
    }
    const NONE: usize = usize::MAX;
    // Face walk through opp(i): returns false if a face is closed with the
    // wrong degree or a partial face is already too long.
    fn faces_ok(s: &State, i: usize) -> bool {
        let start = i ^ 1;
        let mut x = start;
        let mut back = 0;
        // Walk backwards: the face predecessor of y is opp(prev[y]).
        loop {
            let p = s.prev[x];
            if p == NONE {
                break;
            }
            x = p ^ 1;
            back += 1;
            if x == start {
                return back == 4;
            }
            if back > 4 {
                return false;
            }
        }
        let mut len = 1;
        let mut y = start;
        loop {
            let nx = s.next[y ^ 1];
            if nx == NONE {
                break;
            }
            y = nx;
            len += 1;
            if len > 4 {
                return false;
            }
        }
        back + len <= 4
    }
    fn rec(s: &mut State, i: usize, total: usize) {
        if i == s.count {
            if s.count == total {
                s.out.push(CombinatorialMap::from_valid(s.next.clone(), 0));
            }
            return;
        }
        let mut candidates: Vec<usize> = (0..s.count).filter(|&j| s.prev[j] == NONE).collect();
        if s.count < total {
            candidates.push(s.count);
        }
        for j in candidates {
            let fresh = j == s.count;
            if fresh {
                s.count += 2;
            }
            s.next[i] = j;
            s.prev[j] = i;
            if faces_ok(s, i) {
                rec(s, i + 1, total);
            }
            s.next[i] = NONE;
            s.prev[j] = NONE;
            if fresh {
                s.count -= 2;
            }
        }
    }
    let total = 2 * edges;
    let mut s = State { next: vec![NONE; total], prev: vec![NONE; total], count: 2, out: Vec::new() };
    rec(&mut s, 0, total);
    s.out
}

/// All pointed bipartite quadrangulations of genus `g` with `n` faces, as
/// (canonical rooted map, base vertex).
pub fn enumerate_pointed_quadrangulations(
    g: usize,
    n: usize,
) -> Result<Vec<(CombinatorialMap, usize)>> {
    guard(n, MAX_QUADRANGULATION_N)?;
    let mut out = Vec::new();
    for m in enumerate_rooted_quadrangular_maps(2 * n) {
        if m.genus() == g && m.is_bipartite_quadrangulation() {
            for v in 0..m.vertex_count() {
                out.push((m.clone(), v));
            }
        }
    }
    Ok(out)
}

/// `(2n - 1)!!`, the number of pairings of `2n` sides.
pub fn double_factorial_odd(n: usize) -> u128 {
    (1..=n as u128).map(|k| 2 * k - 1).product()
}
