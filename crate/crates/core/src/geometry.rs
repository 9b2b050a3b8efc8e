//! Graph distances and metric statistics on maps.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cms::{cms_forward_image, distance_bound, distance_label_identity, ForwardImage};
use crate::error::{Error, Result};
use crate::gtree::WellLabeledGTree;
use crate::map::CombinatorialMap;
use crate::sampling::{Mode, SamplerConfig, DEFAULT_EXACT_LIMIT};
use crate::stats::{bootstrap_interval, least_squares, mean};

/// Graph distances from `source`, in edges.
pub fn bfs_distances(map: &CombinatorialMap, source: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; map.vertex_count()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for h in map.half_edges_at(v) {
            let w = map.target_of(h);
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// `(8/9)^{1/4}`, the distance normalisation of quadrangulations.
pub fn gamma() -> f64 {
    (8.0f64 / 9.0).powf(0.25)
}

/// Distance scale `γ n^{1/4}` of a map with `n` faces.
pub fn distance_scale(n: usize) -> f64 {
    gamma() * (n as f64).powf(0.25)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceProfile {
    pub source: usize,
    pub distances: Vec<u32>,
}

impl DistanceProfile {
    pub fn new(map: &CombinatorialMap, source: usize) -> Self {
        Self { source, distances: bfs_distances(map, source) }
    }

    /// Distances differ by exactly one across every edge.
    pub fn alternates(&self, map: &CombinatorialMap) -> bool {
        (0..map.half_edge_count()).step_by(2).all(|h| {
            let (a, b) = (self.distances[map.vertex_of(h)], self.distances[map.target_of(h)]);
            a.abs_diff(b) == 1
        })
    }

    pub fn mean(&self) -> f64 {
        self.distances.iter().map(|&d| d as f64).sum::<f64>() / self.distances.len() as f64
    }

    /// Number of vertices at distance at most `r`, for every `r` up to the
    /// eccentricity of the source.
    pub fn ball_volumes(&self) -> Vec<usize> {
        let ecc = *self.distances.iter().max().unwrap_or(&0) as usize;
        let mut counts = vec![0usize; ecc + 1];
        for &d in &self.distances {
            counts[d as usize] += 1;
        }
        for r in 1..counts.len() {
            counts[r] += counts[r - 1];
        }
        counts
    }
}

/// Rescaled distances `d(v1, v2) / (γ n^{1/4})` between `reps` independent
/// uniform vertex pairs of a quadrangulation.
pub fn two_point_samples<R: Rng + ?Sized>(map: &CombinatorialMap, rng: &mut R, reps: usize) -> Vec<f64> {
    let scale = distance_scale(map.face_count());
    let vs = map.vertex_count();
    (0..reps)
        .map(|_| {
            let (a, b) = (rng.random_range(0..vs), rng.random_range(0..vs));
            bfs_distances(map, a)[b] as f64 / scale
        })
        .collect()
}

/// Rescaled label bound `d°(i, j) / (γ n^{1/4})` between corners of a tree.
pub fn rescaled_distance_bound(t: &WellLabeledGTree, i: usize, j: usize) -> f64 {
    distance_bound(&t.label_contour(), i, j) as f64 / distance_scale(t.n())
}

/// Number of tree vertices carrying each label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelProfile {
    pub counts: BTreeMap<i64, usize>,
}

impl LabelProfile {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// `(γ n^{1/4} / n) X_n(⌊γ n^{1/4} x⌋)`.
    pub fn rescaled(&self, n: usize, x: f64) -> f64 {
        let s = distance_scale(n);
        let k = (s * x).floor() as i64;
        s / n as f64 * *self.counts.get(&k).unwrap_or(&0) as f64
    }

    /// Integral of the rescaled profile over the line.
    pub fn rescaled_mass(&self, n: usize) -> f64 {
        let s = distance_scale(n);
        // Each label k is a step of width 1/s and height s X(k)/n.
        self.counts.values().map(|&c| c as f64 * s / n as f64 / s).sum()
    }
}

pub fn label_profile(t: &WellLabeledGTree) -> LabelProfile {
    let mut counts = BTreeMap::new();
    for &l in &t.labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    LabelProfile { counts }
}

/// Mean graph distance against size, with a log-log fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub genus: usize,
    pub sizes: Vec<usize>,
    /// Per size, one rescaled mean distance per sampled map.
    pub samples: Vec<Vec<f64>>,
    pub exponent: f64,
    pub interval: (f64, f64),
    pub gamma: f64,
}

impl ScalingReport {
    /// Long format: `genus,n,rep,rescaled_mean_distance`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("genus,n,rep,rescaled_mean_distance\n");
        for (n, xs) in self.sizes.iter().zip(&self.samples) {
            for (r, x) in xs.iter().enumerate() {
                out.push_str(&format!("{},{},{},{}\n", self.genus, n, r, x));
            }
        }
        out
    }
}

/// Bootstrap resamples for exponent intervals.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Exact mode up to the default exact limit, asymptotic beyond.
pub fn sampler_for(genus: usize, n: usize, seed: u64) -> SamplerConfig {
    let mode = if n <= DEFAULT_EXACT_LIMIT { Mode::Exact } else { Mode::Asymptotic };
    SamplerConfig::new(genus, n, seed, mode)
}

/// Draws `reps` maps of each size in parallel; job `k` of size index `i`
/// uses stream `i * reps + k` of a seed drawn from `rng`.
fn per_map<R, T, F>(genus: usize, sizes: &[usize], reps: usize, rng: &mut R, f: F) -> Result<Vec<Vec<T>>>
where
    R: RngCore + ?Sized,
    T: Send,
    F: Fn(&WellLabeledGTree, &ForwardImage, &mut crate::Rng) -> T + Sync,
{
    let seed = rng.next_u64();
    sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let cfg = sampler_for(genus, n, seed);
            cfg.validate()?;
            (0..reps)
                .into_par_iter()
                .map(|k| {
                    let mut r = crate::rng_stream(seed, (i * reps + k) as u64);
                    let t = cfg.sample_tree(&mut r)?;
                    let eps = if r.random::<bool>() { 1 } else { -1 };
                    let image = cms_forward_image(&t, eps);
                    Ok(f(&t, &image, &mut r))
                })
                .collect()
        })
        .collect()
}

/// Fits `E d(v1, v2) ∝ n^α` on uniform quadrangulations of genus `genus`.
/// Each map contributes the mean distance from a uniform vertex to all
/// vertices; the interval is a 95% bootstrap percentile interval.
pub fn fit_distance_exponent<R: Rng + ?Sized>(
    genus: usize,
    sizes: &[usize],
    reps: usize,
    rng: &mut R,
) -> Result<ScalingReport> {
    let mut distinct = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 || reps == 0 {
        return Err(Error::InsufficientSizes(distinct.len()));
    }
    let raw = per_map(genus, &distinct, reps, rng, |_, image, r| {
        let q = &image.quadrangulation.map;
        DistanceProfile::new(q, r.random_range(0..q.vertex_count())).mean()
    })?;
    let xs: Vec<f64> = distinct.iter().map(|&n| (n as f64).ln()).collect();
    let slope = |groups: &[Vec<f64>]| {
        let ys: Vec<f64> = groups.iter().map(|g| mean(g).ln()).collect();
        least_squares(&xs, &ys).slope
    };
    let exponent = slope(&raw);
    let interval = bootstrap_interval(&raw, slope, BOOTSTRAP_RESAMPLES, 0.95, rng);
    let samples = raw
        .iter()
        .zip(&distinct)
        .map(|(g, &n)| g.iter().map(|d| d / distance_scale(n)).collect())
        .collect();
    Ok(ScalingReport { genus, sizes: distinct, samples, exponent, interval, gamma: gamma() })
}

/// Ball volume growth around random centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallVolumeFit {
    pub radii: Vec<usize>,
    /// Mean `|B(x, r)|` over the centers.
    pub volumes: Vec<f64>,
    pub slope: f64,
    /// Radii of the window dropped because some ball covered the map.
    pub trimmed: Vec<usize>,
}

/// Log-log slope of the mean ball volume `|B(x, r)|` against `r` for
/// `r ∈ [n^{1/8}, n^{1/4}/2]`, over `centers` uniform centers. Radii at
/// which a ball already holds every vertex are dropped.
pub fn ball_volume_exponent<R: Rng + ?Sized>(
    map: &CombinatorialMap,
    centers: usize,
    rng: &mut R,
) -> Result<BallVolumeFit> {
    let n = map.face_count() as f64;
    let lo = n.powf(0.125).ceil().max(1.0) as usize;
    let hi = (n.powf(0.25) / 2.0).floor() as usize;
    let vs = map.vertex_count();
    let balls: Vec<Vec<usize>> = (0..centers.max(1))
        .map(|_| DistanceProfile::new(map, rng.random_range(0..vs)).ball_volumes())
        .collect();
    let volume = |b: &Vec<usize>, r: usize| b[r.min(b.len() - 1)];
    let mut radii = Vec::new();
    let mut trimmed = Vec::new();
    for r in lo..=hi {
        if balls.iter().any(|b| volume(b, r) == vs) {
            trimmed.push(r);
        } else {
            radii.push(r);
        }
    }
    if radii.len() < 2 {
        return Err(Error::InsufficientSizes(radii.len()));
    }
    let volumes: Vec<f64> = radii
        .iter()
        .map(|&r| balls.iter().map(|b| volume(b, r) as f64).sum::<f64>() / balls.len() as f64)
        .collect();
    let xs: Vec<f64> = radii.iter().map(|&r| (r as f64).ln()).collect();
    let ys: Vec<f64> = volumes.iter().map(|v| v.ln()).collect();
    Ok(BallVolumeFit { slope: least_squares(&xs, &ys).slope, radii, volumes, trimmed })
}

/// Point against which corner distances are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CornerReference {
    /// The distinguished vertex `v•`: `d(v•, q(i)) = Λ(i) − min Λ + 1`.
    BasePoint,
    /// The image of a corner of minimal label:
    /// `d(q(s•), q(i)) = Λ(i) − Λ(s•) + 1`.
    MinimalCorner,
}

/// Corners `i` at which the corner distance identity fails for `reference`.
pub fn corner_identity_failures(
    t: &WellLabeledGTree,
    image: &ForwardImage,
    reference: CornerReference,
) -> Vec<usize> {
    let lab = t.label_contour();
    let len = lab.len() - 1;
    let s = (0..len).min_by_key(|&i| lab[i]).unwrap();
    let pq = &image.quadrangulation;
    let source = match reference {
        CornerReference::BasePoint => pq.base,
        CornerReference::MinimalCorner => image.vertex_of_tree_vertex[t.tree.tr(s)],
    };
    let d = bfs_distances(&pq.map, source);
    (0..len)
        .filter(|&i| {
            let v = image.vertex_of_tree_vertex[t.tree.tr(i)];
            d[v] as i64 != lab[i] - lab[s] + 1
        })
        .collect()
}

/// Distances to `v•` equal the shifted labels, the corner identity holds
/// with the base point as reference, and every corner of minimal label is
/// adjacent to `v•`.
pub fn distance_to_base_check(t: &WellLabeledGTree, image: &ForwardImage) -> bool {
    if !distance_label_identity(t, image) || !corner_identity_failures(t, image, CornerReference::BasePoint).is_empty() {
        return false;
    }
    let lab = t.label_contour();
    let min = lab.iter().min().copied().unwrap_or(0);
    let pq = &image.quadrangulation;
    let d = bfs_distances(&pq.map, pq.base);
    (0..lab.len() - 1)
        .filter(|&i| lab[i] == min)
        .all(|i| d[image.vertex_of_tree_vertex[t.tree.tr(i)]] == 1)
}
