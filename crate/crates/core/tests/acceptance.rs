//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero when
//! any criterion fails.

use std::collections::HashSet;
use std::time::Instant;

use quadgenus::chapuy::{
    glue, intertwined_counts_along, open, opened_contour_direct, opened_contour_via_formulas, opening_sequences,
};
use quadgenus::cms::{
    check_distance_bound, cms_forward, cms_forward_image, cms_inverse, distance_label_identity,
    PointedQuadrangulation,
};
use quadgenus::continuum::{cross_check, sample_brownian_bridge, sample_fp_bridge};
use quadgenus::enumerate::{enumerate_gtrees, enumerate_labeled_gtrees, enumerate_pointed_quadrangulations};
use quadgenus::forest::count_forests;
use quadgenus::geometry::{ball_volume_exponent, bfs_distances, fit_distance_exponent, sampler_for};
use quadgenus::sampling::{sample_quadrangulation, sample_wl_gtree_exact};
use quadgenus::scheme::{decompose, decompose_labeled, is_dominant, recompose, recompose_labeled, scheme_nodes};
use quadgenus::stats::{bonferroni_pass, chi_square_uniform};
use quadgenus::{rng_stream, Rng as ChaCha, WellLabeledGTree};
use rand::Rng;

const SEED: u64 = 2026;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rng(criterion: u64) -> ChaCha {
    rng_stream(SEED, criterion)
}

fn bijection_exactness() -> Outcome {
    let mut round_trip_failures = 0;
    let mut counts = Vec::new();
    let mut literal = true;
    for g in 0..=1 {
        for n in 1..=4 {
            let trees = enumerate_labeled_gtrees(g, n).unwrap();
            for t in &trees {
                for eps in [-1i8, 1] {
                    let pq = cms_forward(t, eps);
                    if cms_inverse(&pq).ok() != Some((t.clone(), eps)) {
                        round_trip_failures += 1;
                    }
                }
            }
            let quads = enumerate_pointed_quadrangulations(g, n).unwrap();
            let mut seen = HashSet::new();
            for (map, base) in &quads {
                let pq = PointedQuadrangulation::new(map.clone(), *base).unwrap();
                match cms_inverse(&pq) {
                    Ok((t, eps)) if cms_forward(&t, eps) == pq.canonical() && seen.insert((t.clone(), eps)) => {}
                    _ => round_trip_failures += 1,
                }
            }
            let shapes = enumerate_gtrees(g, n).unwrap().len();
            let claimed = 2 * 3usize.pow(n as u32) * shapes;
            if quads.len() != claimed {
                literal = false;
            }
            if quads.len() != 2 * trees.len() {
                round_trip_failures += 1;
            }
            counts.push(format!("g{g}n{n}: |Q•|={} 2·3^n·#trees={claimed} 2|T|={}", quads.len(), 2 * trees.len()));
        }
    }
    outcome(
        round_trip_failures == 0 && literal,
        format!(
            "round-trip failures {round_trip_failures}; count identity 2·3^n·#g-trees {}; {}",
            if literal { "holds" } else { "fails" },
            counts.join(", ")
        ),
    )
}

fn distance_label_identity_check() -> Outcome {
    let mut rng = rng(2);
    let mut bad = 0;
    for g in 1..=2 {
        for _ in 0..100 {
            let t = sample_wl_gtree_exact(g, 1000, &mut rng).unwrap();
            let eps = if rng.random::<bool>() { 1 } else { -1 };
            if !distance_label_identity(&t, &cms_forward_image(&t, eps)) {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{bad} of 200 maps violate d(v•, v) = shifted label"))
}

fn distance_bound_check() -> Outcome {
    let mut violations = 0;
    let mut exhaustive_pairs = 0usize;
    for g in 0..=1 {
        for n in 1..=4 {
            for t in enumerate_labeled_gtrees(g, n).unwrap() {
                for eps in [-1i8, 1] {
                    let image = cms_forward_image(&t, eps);
                    let map = &image.quadrangulation.map;
                    for i in 0..2 * n {
                        let d = bfs_distances(map, image.vertex_of_tree_vertex[t.tree.tr(i)]);
                        for j in 0..2 * n {
                            exhaustive_pairs += 1;
                            violations += check_distance_bound(&t, &image, &d, i, j).is_err() as usize;
                        }
                    }
                }
            }
        }
    }
    let mut rng = rng(3);
    let mut random_pairs = 0usize;
    for g in 1..=2 {
        let cfg = sampler_for(g, 10_000, SEED);
        for _ in 0..100 {
            let t = cfg.sample_tree(&mut rng).unwrap();
            let image = cms_forward_image(&t, 1);
            let map = &image.quadrangulation.map;
            for _ in 0..20 {
                let i = rng.random_range(0..2 * t.n());
                let d = bfs_distances(map, image.vertex_of_tree_vertex[t.tree.tr(i)]);
                for _ in 0..50 {
                    let j = rng.random_range(0..2 * t.n());
                    random_pairs += 1;
                    violations += check_distance_bound(&t, &image, &d, i, j).is_err() as usize;
                }
            }
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations over {exhaustive_pairs} exhaustive and {random_pairs} random corner pairs"),
    )
}

fn genus_preservation() -> Outcome {
    let mut rng = rng(4);
    let mut checked = 0;
    let mut bad = 0;
    let mut check = |t: &WellLabeledGTree, g: usize, n: usize, rng: &mut ChaCha| {
        let eps = if rng.random::<bool>() { 1 } else { -1 };
        let pq = cms_forward(t, eps);
        let ok = t.genus() == g
            && t.tree.vertex_count() == n + 1 - 2 * g
            && pq.map.genus() == g
            && pq.map.euler_characteristic() == 2 - 2 * g as i64
            && pq.map.vertex_count() == n + 2 - 2 * g
            && pq.map.is_bipartite_quadrangulation();
        checked += 1;
        bad += !ok as usize;
    };
    for g in 0..=1 {
        for n in (2 * g).max(1)..=4 {
            for t in enumerate_labeled_gtrees(g, n).unwrap() {
                check(&t, g, n, &mut rng);
            }
        }
    }
    for g in 0..=2 {
        for n in [10, 100, 1000, 5000] {
            let cfg = sampler_for(g, n, SEED);
            for _ in 0..20 {
                let t = cfg.sample_tree(&mut rng).unwrap();
                check(&t, g, n, &mut rng);
            }
        }
    }
    outcome(bad == 0, format!("{bad} of {checked} trees/maps with wrong genus or vertex count"))
}

fn dominant_tree(g: usize, n: usize, rng: &mut ChaCha) -> WellLabeledGTree {
    loop {
        let t = sample_wl_gtree_exact(g, n, rng).unwrap();
        if is_dominant(&decompose(&t.tree).unwrap().scheme) {
            return t;
        }
    }
}

fn chapuy_suite() -> Outcome {
    let mut rng = rng(5);
    let mut stage_failures = 0;
    let mut glue_failures = 0;
    for g in 1..=2 {
        for _ in 0..100 {
            let t = dominant_tree(g, 500, &mut rng);
            for seq in opening_sequences(&t.tree).unwrap() {
                let want: Vec<usize> = (0..=g).rev().map(|k| 2 * k).collect();
                if intertwined_counts_along(&t.tree, &seq).ok() != Some(want) {
                    stage_failures += 1;
                }
                let back = open(&t, &seq).and_then(|w| glue(&w));
                if back.ok() != Some((t.clone(), seq)) {
                    glue_failures += 1;
                }
            }
        }
    }
    let mut formula_failures = 0;
    for _ in 0..50 {
        let t = dominant_tree(1, 200, &mut rng);
        let d = decompose_labeled(&t).unwrap();
        let nodes = scheme_nodes(&t.tree).unwrap();
        for s in opening_sequences(&d.scheme).unwrap() {
            let tree_seq: Vec<usize> = s.iter().map(|&v| nodes[v]).collect();
            let direct = opened_contour_direct(&open(&t, &tree_seq).unwrap());
            if opened_contour_via_formulas(&d, &s).ok() != Some(direct) {
                formula_failures += 1;
            }
        }
    }
    outcome(
        stage_failures + glue_failures + formula_failures == 0,
        format!(
            "intertwined-count failures {stage_failures}, glue∘open failures {glue_failures}, contour formula mismatches {formula_failures}"
        ),
    )
}

fn decomposition_suite() -> Outcome {
    let mut failures = 0;
    let mut checked = 0;
    let mut check = |t: &WellLabeledGTree| {
        checked += 1;
        let ok = (|| {
            let d = decompose_labeled(t).ok()?;
            let sizes = (0..d.forests.len()).map(|h| 2 * d.m(h) + d.sigma(h)).sum::<usize>() == 2 * t.n();
            let reversal = (0..d.motzkin.len()).all(|h| d.motzkin[h ^ 1] == d.motzkin[h].reversed());
            let labelled = recompose_labeled(&d).ok()? == *t;
            let unlabelled = recompose(&decompose(&t.tree).ok()?).ok()? == t.tree;
            Some(sizes && reversal && labelled && unlabelled)
        })();
        failures += (ok != Some(true)) as usize;
    };
    for n in 2..=4 {
        for t in enumerate_labeled_gtrees(1, n).unwrap() {
            check(&t);
        }
    }
    let mut rng = rng(6);
    for g in 1..=2 {
        for n in [10, 100, 1000] {
            for _ in 0..30 {
                check(&sample_wl_gtree_exact(g, n, &mut rng).unwrap());
            }
        }
    }
    outcome(failures == 0, format!("{failures} of {checked} trees fail round trip, size identity or path reversal"))
}

fn counting() -> Outcome {
    let mut forest_mismatches = 0;
    for sigma in 1..=12usize {
        for m in 0..=(12 - sigma) / 2 {
            let len = 2 * m + sigma;
            let brute = (0u32..1 << len)
                .filter(|bits| {
                    let mut h = sigma as i64;
                    (0..len).all(|k| {
                        h += if bits >> k & 1 == 1 { 1 } else { -1 };
                        h > 0 || k == len - 1
                    }) && h == 0
                })
                .count();
            forest_mismatches += (count_forests(sigma, m) != brute.into()) as usize;
        }
    }
    let mut rng = rng(7);
    let mut p = Vec::new();
    for (g, n) in [(0, 4), (1, 3), (1, 4)] {
        let universe: Vec<String> = enumerate_labeled_gtrees(g, n).unwrap().iter().map(|t| t.to_text()).collect();
        let index: std::collections::HashMap<&String, usize> = universe.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut counts = vec![0u64; universe.len()];
        for _ in 0..100_000 {
            counts[index[&sample_wl_gtree_exact(g, n, &mut rng).unwrap().to_text()]] += 1;
        }
        p.push((format!("trees g{g}n{n}"), chi_square_uniform(&counts).p_value));
    }
    let quads: Vec<(Vec<usize>, usize)> = enumerate_pointed_quadrangulations(1, 3)
        .unwrap()
        .into_iter()
        .map(|(m, v)| (m.next_at_vertex().to_vec(), v))
        .collect();
    let index: std::collections::HashMap<&(Vec<usize>, usize), usize> =
        quads.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut counts = vec![0u64; quads.len()];
    for _ in 0..100_000 {
        let (m, base) = sample_quadrangulation(1, 3, &mut rng, true).unwrap();
        let pq = PointedQuadrangulation::new(m, base.unwrap()).unwrap().canonical();
        counts[index[&(pq.map.next_at_vertex().to_vec(), pq.base)]] += 1;
    }
    p.push(("pointed quadrangulations g1n3".into(), chi_square_uniform(&counts).p_value));
    let uniform = p.iter().all(|(_, p)| *p > 0.001);
    let shown: Vec<String> = p.iter().map(|(k, p)| format!("{k} p={p:.3}")).collect();
    outcome(
        forest_mismatches == 0 && uniform,
        format!("forest count mismatches {forest_mismatches}; χ² {}", shown.join(", ")),
    )
}

fn scaling_exponent() -> Outcome {
    let mut rng = rng(8);
    let sizes: Vec<usize> = (10..=16).map(|k| 1 << k).collect();
    let mut pass = true;
    let mut shown = Vec::new();
    for g in 1..=2 {
        let r = fit_distance_exponent(g, &sizes, 200, &mut rng).unwrap();
        pass &= r.interval.0 >= 0.22 && r.interval.1 <= 0.28;
        shown.push(format!("g{g}: {:.4} CI [{:.4}, {:.4}]", r.exponent, r.interval.0, r.interval.1));
    }
    outcome(pass, format!("{} (required CI within [0.22, 0.28])", shown.join("; ")))
}

fn dimension_proxy() -> Outcome {
    let mut rng = rng(9);
    let pq = sampler_for(1, 100_000, SEED).sample_pointed(&mut rng).unwrap();
    let fit = ball_volume_exponent(&pq.map, 20, &mut rng).unwrap();
    outcome(
        (3.4..=4.6).contains(&fit.slope),
        format!("slope {:.3} over radii {:?} (required [3.4, 4.6])", fit.slope, fit.radii),
    )
}

fn continuum_cross_checks() -> Outcome {
    let mut rng = rng(10);
    let mut endpoint_failures = 0;
    for _ in 0..100 {
        let b = sample_brownian_bridge(0.7f64, 0.1, -0.4, 50, &mut rng).unwrap();
        endpoint_failures += (b.values[0] != 0.1 || b.values[50] != -0.4) as usize;
        let f = sample_fp_bridge(0.7f64, 0.3, 50, &mut rng).unwrap();
        endpoint_failures +=
            (f.values[0] != 0.0 || f.values[50] != -0.3 || f.values[..50].iter().any(|&v| v <= -0.3)) as usize;
    }
    let mut p = Vec::new();
    let mut worst = (String::new(), 1.0);
    for g in 1..=2 {
        for c in cross_check(g, 2000, 500, &mut rng).unwrap() {
            if c.result.p_value < worst.1 {
                worst = (format!("g{g} {}", c.statistic), c.result.p_value);
            }
            p.push(c.result.p_value);
        }
    }
    outcome(
        endpoint_failures == 0 && bonferroni_pass(&p, 0.01),
        format!(
            "{} KS tests, smallest p {:.4} ({}) against {:.5}; endpoint failures {endpoint_failures}",
            p.len(),
            worst.1,
            worst.0,
            0.01 / p.len() as f64
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("bijection exactness", bijection_exactness),
        ("distance-label identity", distance_label_identity_check),
        ("distance bound", distance_bound_check),
        ("genus preservation", genus_preservation),
        ("opening suite", chapuy_suite),
        ("decomposition suite", decomposition_suite),
        ("counting", counting),
        ("scaling exponent", scaling_exponent),
        ("dimension proxy", dimension_proxy),
        ("continuum cross-checks", continuum_cross_checks),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        failed += !o.pass as usize;
        println!(
            "criterion {:2} {} {name}: {} [{:.1}s]",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
