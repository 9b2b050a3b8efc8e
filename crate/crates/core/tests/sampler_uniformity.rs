//! Distribution checks of the exact samplers against exhaustive enumeration.

use std::collections::HashMap;

use quadgenus::cms::PointedQuadrangulation;
use quadgenus::enumerate::{enumerate_gtrees, enumerate_labeled_gtrees, enumerate_pointed_quadrangulations};
use quadgenus::sampling::{
    bounded_decomposition_count, sample_labels, sample_plane_tree, sample_quadrangulation,
    sample_wl_gtree_exact,
};
use quadgenus::stats::chi_square_uniform;
use quadgenus::{rng_stream, GTree};

const DRAWS: usize = 100_000;

fn counts_over<K: std::hash::Hash + Eq + Clone>(universe: &[K], draws: impl Iterator<Item = K>) -> Vec<u64> {
    let index: HashMap<K, usize> = universe.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let mut counts = vec![0u64; universe.len()];
    for k in draws {
        let i = *index.get(&k).expect("sampled object missing from the enumeration");
        counts[i] += 1;
    }
    counts
}

fn labeled_tree_uniformity(g: usize, n: usize, seed: u64) {
    let universe: Vec<String> = enumerate_labeled_gtrees(g, n).unwrap().iter().map(|t| t.to_text()).collect();
    let mut rng = rng_stream(seed, 0);
    let draws = (0..DRAWS).map(|_| {
        let t = sample_wl_gtree_exact(g, n, &mut rng).unwrap();
        assert_eq!(t.genus(), g);
        t.validate_labels().unwrap();
        t.to_text()
    });
    let counts = counts_over(&universe, draws);
    let r = chi_square_uniform(&counts);
    assert!(r.p_value > 0.001, "g={g} n={n}: {} categories, p = {}", universe.len(), r.p_value);
}

#[test]
fn genus_one_three_edges() {
    labeled_tree_uniformity(1, 3, 11);
}

#[test]
fn genus_one_four_edges() {
    labeled_tree_uniformity(1, 4, 12);
}

#[test]
fn genus_zero_four_edges() {
    labeled_tree_uniformity(0, 4, 13);
}

#[test]
fn plane_trees_three_edges() {
    let universe: Vec<String> = enumerate_gtrees(0, 3).unwrap().iter().map(GTree::word_string).collect();
    assert_eq!(universe.len(), 5);
    let mut rng = rng_stream(14, 0);
    let counts = counts_over(&universe, (0..DRAWS).map(|_| sample_plane_tree(3, &mut rng).word_string()));
    assert!(chi_square_uniform(&counts).p_value > 0.001);
}

#[test]
fn labels_of_a_fixed_torus_tree() {
    // Every labelling of one genus-1 tree, uniformly.
    let t = enumerate_gtrees(1, 4).unwrap().into_iter().max_by_key(|t| t.vertex_count()).unwrap();
    let universe: Vec<String> = quadgenus::enumerate::well_labelings(&t).iter().map(|w| w.to_text()).collect();
    assert!(universe.len() > 1);
    let mut rng = rng_stream(15, 0);
    let counts = counts_over(&universe, (0..DRAWS / 4).map(|_| sample_labels(&t, &mut rng).to_text()));
    assert!(chi_square_uniform(&counts).p_value > 0.001);
}

#[test]
fn pointed_quadrangulations_genus_one() {
    let n = 3;
    let universe: Vec<(Vec<usize>, usize)> = enumerate_pointed_quadrangulations(1, n)
        .unwrap()
        .into_iter()
        .map(|(m, v)| (m.next_at_vertex().to_vec(), v))
        .collect();
    assert_eq!(universe.len(), 2 * enumerate_labeled_gtrees(1, n).unwrap().len());
    let mut rng = rng_stream(16, 0);
    let draws = (0..DRAWS).map(|_| {
        let (m, base) = sample_quadrangulation(1, n, &mut rng, true).unwrap();
        assert_eq!(m.genus(), 1);
        assert!(m.is_bipartite_quadrangulation());
        let pq = PointedQuadrangulation::new(m, base.unwrap()).unwrap().canonical();
        (pq.map.next_at_vertex().to_vec(), pq.base)
    });
    let counts = counts_over(&universe, draws);
    assert!(chi_square_uniform(&counts).p_value > 0.001);
}

#[test]
fn smallest_torus_size() {
    // One g-tree with two edges and a single vertex: one labelling, two
    // pointed quadrangulations, one unpointed.
    assert_eq!(enumerate_labeled_gtrees(1, 2).unwrap().len(), 1);
    assert_eq!(enumerate_pointed_quadrangulations(1, 2).unwrap().len(), 2);
    let mut rng = rng_stream(17, 0);
    let mut seen = std::collections::HashSet::new();
    for _ in 0..200 {
        let (m, base) = sample_quadrangulation(1, 2, &mut rng, true).unwrap();
        let pq = PointedQuadrangulation::new(m, base.unwrap()).unwrap().canonical();
        seen.insert((pq.map.next_at_vertex().to_vec(), pq.base));
    }
    assert_eq!(seen.len(), 2);
}

#[test]
fn bounded_counts_grow() {
    let a = bounded_decomposition_count(2, 10).unwrap();
    let b = bounded_decomposition_count(2, 11).unwrap();
    assert!(b > a);
}
