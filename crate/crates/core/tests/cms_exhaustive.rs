use std::collections::HashSet;

use quadgenus::cms::{cms_forward, cms_forward_image, cms_inverse, distance_label_identity, PointedQuadrangulation};
use quadgenus::enumerate::{enumerate_labeled_gtrees, enumerate_pointed_quadrangulations};

#[test]
fn forward_then_inverse_is_identity() {
    for g in 0..=1 {
        for n in 1..=4 {
            for t in enumerate_labeled_gtrees(g, n).unwrap() {
                for eps in [-1i8, 1] {
                    let image = cms_forward_image(&t, eps);
                    let pq = &image.quadrangulation;
                    assert!(pq.map.is_bipartite_quadrangulation(), "{}", t.to_text());
                    assert_eq!(pq.genus(), g, "{}", t.to_text());
                    assert_eq!(pq.map.vertex_count(), n + 2 - 2 * g);
                    assert!(distance_label_identity(&t, &image));
                    let (back, e) = cms_inverse(pq).unwrap();
                    assert_eq!(e, eps);
                    assert_eq!(back, t, "{}", t.to_text());
                }
            }
        }
    }
}

#[test]
fn inverse_then_forward_is_identity() {
    for g in 0..=1 {
        for n in 1..=4 {
            let quads = enumerate_pointed_quadrangulations(g, n).unwrap();
            let trees = enumerate_labeled_gtrees(g, n).unwrap();
            assert_eq!(quads.len(), 2 * trees.len(), "g = {g}, n = {n}");
            let mut images = HashSet::new();
            for (map, base) in quads {
                let pq = PointedQuadrangulation::new(map, base).unwrap();
                let (t, eps) = cms_inverse(&pq).unwrap();
                let again = cms_forward(&t, eps);
                assert_eq!(again, pq.canonical());
                assert!(images.insert((t, eps)));
            }
        }
    }
}
