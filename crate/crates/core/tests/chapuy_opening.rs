//! Opening and gluing dominant g-trees, and the opened contour formulas.

use quadgenus::chapuy::{
    glue, intertwined_counts_along, intertwined_nodes, open, opened_contour_direct, opened_contour_via_formulas,
    opening_sequences,
};
use quadgenus::scheme::{decompose_labeled, is_dominant, scheme_nodes};
use quadgenus::sampling::sample_wl_gtree_exact;
use quadgenus::{rng_stream, WellLabeledGTree};

fn dominant_tree(g: usize, n: usize, rng: &mut quadgenus::Rng) -> WellLabeledGTree {
    loop {
        let t = sample_wl_gtree_exact(g, n, rng).unwrap();
        if is_dominant(&decompose_labeled(&t).unwrap().scheme) {
            return t;
        }
    }
}

/// Opening sequences of `t` as g-tree vertices, with the matching scheme
/// vertex sequences.
fn sequences(t: &WellLabeledGTree) -> Vec<(Vec<usize>, Vec<usize>)> {
    let d = decompose_labeled(t).unwrap();
    let nodes = scheme_nodes(&t.tree).unwrap();
    opening_sequences(&d.scheme)
        .unwrap()
        .into_iter()
        .map(|s| (s.iter().map(|&v| nodes[v]).collect(), s))
        .collect()
}

#[test]
fn open_glue_round_trip_and_intertwined_counts() {
    let mut rng = rng_stream(21, 0);
    for g in 1..=2 {
        for _ in 0..100 {
            let t = dominant_tree(g, 500, &mut rng);
            assert_eq!(intertwined_nodes(&t.tree).unwrap().len(), 2 * g);
            let seqs = sequences(&t);
            assert_eq!(seqs.len(), (1 << g) * (1..=g).product::<usize>());
            let (seq, _) = &seqs[rng_index(&mut rng, seqs.len())];
            let counts = intertwined_counts_along(&t.tree, seq).unwrap();
            let want: Vec<usize> = (0..=g).rev().map(|k| 2 * k).collect();
            assert_eq!(counts, want);
            let w = open(&t, seq).unwrap();
            w.validate().unwrap();
            assert_eq!(w.tree.genus(), 0);
            assert_eq!(w.tree.n(), t.n());
            let mut before = t.labels.clone();
            let mut after = w.labels.clone().unwrap();
            before.sort_unstable();
            after.sort_unstable();
            assert_eq!(after.len(), before.len() + 2 * g);
            let (back, back_seq) = glue(&w).unwrap();
            assert_eq!(back, t);
            assert_eq!(&back_seq, seq);
        }
    }
}

fn rng_index(rng: &mut quadgenus::Rng, len: usize) -> usize {
    use rand::Rng;
    rng.random_range(0..len)
}

#[test]
fn formulas_match_the_direct_contour() {
    let mut rng = rng_stream(22, 0);
    for n in [8, 20, 200] {
        for _ in 0..50 {
            let t = dominant_tree(1, n, &mut rng);
            let d = decompose_labeled(&t).unwrap();
            for (tree_seq, scheme_seq) in sequences(&t) {
                let w = open(&t, &tree_seq).unwrap();
                let direct = opened_contour_direct(&w);
                let formula = opened_contour_via_formulas(&d, &scheme_seq).unwrap();
                assert_eq!(formula.c.len(), 2 * n + 1);
                assert_eq!(formula, direct, "n = {n}, tree {}", t.to_text());
            }
        }
    }
}

#[test]
fn formulas_match_the_direct_contour_genus_two() {
    let mut rng = rng_stream(23, 0);
    for _ in 0..30 {
        let t = dominant_tree(2, 120, &mut rng);
        let d = decompose_labeled(&t).unwrap();
        for (tree_seq, scheme_seq) in sequences(&t) {
            let w = open(&t, &tree_seq).unwrap();
            assert_eq!(opened_contour_via_formulas(&d, &scheme_seq).unwrap(), opened_contour_direct(&w));
        }
    }
}
