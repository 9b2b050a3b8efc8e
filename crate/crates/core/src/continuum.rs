//! Samplers for the continuum limits of the discrete encodings: Brownian
//! bridges, first-passage bridges, the head of the Brownian snake, and the
//! limit law `μ` of the scheme, sizes, node labels and root offset.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::sample_forest_contour;
use crate::gtree::GTree;
use crate::gtree::WellLabeledGTree;
use crate::sampling::sample_wl_gtree_exact;
use crate::scheme::{decompose_labeled, dominant_schemes, is_dominant};
use crate::stats::{ks_two_sample, TestResult};
use crate::Real;

/// A real function on `[0, lifetime]` sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample<S: Real> {
    pub lifetime: S,
    pub values: Vec<S>,
}

impl<S: Real> PathSample<S> {
    pub fn new(lifetime: S, values: Vec<S>) -> Result<Self> {
        if values.len() < 2 || !(lifetime > S::zero()) {
            return Err(Error::MalformedContour("a path needs a positive lifetime and two samples".into()));
        }
        Ok(Self { lifetime, values })
    }

    /// Number of grid intervals.
    pub fn grid_size(&self) -> usize {
        self.values.len() - 1
    }

    /// Linear interpolation at time `t`, frozen after the lifetime.
    pub fn at(&self, t: S) -> S {
        let n = self.grid_size();
        let x = (t.max(S::zero()) / self.lifetime).min(S::one()) * S::from_usize(n).unwrap();
        let i = x.floor().to_usize().unwrap().min(n - 1);
        let frac = x - S::from_usize(i).unwrap();
        self.values[i] + (self.values[i + 1] - self.values[i]) * frac
    }

    pub fn time(&self, i: usize) -> S {
        self.lifetime * S::from_usize(i).unwrap() / S::from_usize(self.grid_size()).unwrap()
    }

    /// The path `f(t) - 2 inf_{[0,t]} f`.
    pub fn minus_twice_running_min(&self) -> Self {
        let mut inf = S::infinity();
        let values = self
            .values
            .iter()
            .map(|&v| {
                inf = inf.min(v);
                v - inf - inf
            })
            .collect();
        Self { lifetime: self.lifetime, values }
    }

    /// `t, value` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{:?},{:?}\n", self.time(i), v));
        }
        out
    }
}

fn normal<S: Real, R: Rng + ?Sized>(rng: &mut R) -> S {
    let z: f64 = StandardNormal.sample(rng);
    S::from_f64(z).unwrap()
}

fn real<S: Real>(x: f64) -> S {
    S::from_f64(x).unwrap()
}

/// Brownian bridge on `[0, m]` from `l0` to `l1`, exact on a grid of `n` steps.
pub fn sample_brownian_bridge<S: Real, R: Rng + ?Sized>(
    m: S,
    l0: S,
    l1: S,
    n: usize,
    rng: &mut R,
) -> Result<PathSample<S>> {
    if n == 0 || !(m > S::zero()) {
        return Err(Error::MalformedContour("a bridge needs a positive lifetime and grid".into()));
    }
    let dt = m / S::from_usize(n).unwrap();
    let mut walk = Vec::with_capacity(n + 1);
    let mut w = S::zero();
    walk.push(w);
    for _ in 0..n {
        w = w + normal::<S, R>(rng) * dt.sqrt();
        walk.push(w);
    }
    let end = walk[n];
    let nn = S::from_usize(n).unwrap();
    let values = walk
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let s = S::from_usize(i).unwrap() / nn;
            l0 + (l1 - l0) * s + w - end * s
        })
        .collect::<Vec<_>>();
    let mut values = values;
    values[0] = l0;
    values[n] = l1;
    PathSample::new(m, values)
}

/// Number of internal walk steps behind a first-passage bridge on a grid of
/// `n` steps: a multiple of `n` of at least `max(n², 10^4)`.
pub fn fp_walk_length(n: usize) -> usize {
    let target = (n * n).max(10_000);
    target.div_ceil(n) * n
}

/// First-passage bridge from 0 to `-sigma` on `[0, m]`, as a rescaled
/// uniform walk that first hits its final level at its last step.
pub fn sample_fp_bridge<S: Real, R: Rng + ?Sized>(
    m: S,
    sigma: S,
    n: usize,
    rng: &mut R,
) -> Result<PathSample<S>> {
    if n == 0 || !(m > S::zero()) || !(sigma > S::zero()) {
        return Err(Error::MalformedContour("a first-passage bridge needs m, σ > 0".into()));
    }
    let len = fp_walk_length(n);
    let ratio = (sigma / m.sqrt()).to_f64().unwrap();
    let mut k = ((ratio * (len as f64).sqrt()).round() as usize).clamp(1, len);
    if (len - k) % 2 == 1 {
        k = if k < len { k + 1 } else { k - 1 };
    }
    let c = sample_forest_contour(k, (len - k) / 2, rng);
    let scale = sigma / S::from_usize(k).unwrap();
    let step = len / n;
    let mut values: Vec<S> = (0..=n)
        .map(|i| S::from_i64(c[i * step] - k as i64).unwrap() * scale)
        .collect();
    values[0] = S::zero();
    values[n] = -sigma;
    PathSample::new(m, values)
}

/// Head of the Brownian snake driven by `f`: a centred Gaussian process with
/// `cov(Z(s), Z(t)) = min over the grid of [s, t] of (f - running min of f)`.
///
/// The values are built along the genealogy coded by `f - running min`,
/// keeping the labels of the current ancestral line on a stack; the value at
/// a branching height between two stored points is a Brownian bridge draw.
pub fn snake_over<S: Real, R: Rng + ?Sized>(f: &PathSample<S>, rng: &mut R) -> PathSample<S> {
    let mut inf = S::infinity();
    let heights: Vec<S> = f
        .values
        .iter()
        .map(|&v| {
            inf = inf.min(v);
            v - inf
        })
        .collect();
    let mut stack: Vec<(S, S)> = vec![(S::zero(), S::zero())];
    let mut z = Vec::with_capacity(heights.len());
    let first = heights[0];
    if first > S::zero() {
        let v = normal::<S, R>(rng) * first.sqrt();
        stack.push((first, v));
    }
    z.push(stack.last().unwrap().1);
    for w in heights.windows(2) {
        let b = w[0].min(w[1]);
        let mut above = None;
        while stack.last().unwrap().0 > b {
            above = stack.pop();
        }
        let (h1, v1) = *stack.last().unwrap();
        if h1 < b {
            let (h2, v2) = above.expect("a point above the branching height");
            let t = (b - h1) / (h2 - h1);
            let var = (b - h1) * (h2 - b) / (h2 - h1);
            let vb = v1 + (v2 - v1) * t + normal::<S, R>(rng) * var.max(S::zero()).sqrt();
            stack.push((b, vb));
        }
        let (_, vb) = *stack.last().unwrap();
        if w[1] > b {
            let v = vb + normal::<S, R>(rng) * (w[1] - b).sqrt();
            stack.push((w[1], v));
        }
        z.push(stack.last().unwrap().1);
    }
    PathSample { lifetime: f.lifetime, values: z }
}

/// First-passage bridge `F` and the snake head `Z` it drives.
pub fn sample_snake_head<S: Real, R: Rng + ?Sized>(
    m: S,
    sigma: S,
    n: usize,
    rng: &mut R,
) -> Result<(PathSample<S>, PathSample<S>)> {
    let f = sample_fp_bridge(m, sigma, n, rng)?;
    let z = snake_over(&f, rng);
    Ok((f, z))
}

/// `d_K(f, g) = |σ(f) - σ(g)| + sup_y |f(y ∧ σ(f)) - g(y ∧ σ(g))|`, the sup
/// taken over the union of both grids.
pub fn d_k<S: Real>(f: &PathSample<S>, g: &PathSample<S>) -> S {
    let horizon = f.lifetime.max(g.lifetime);
    let mut times: Vec<S> = (0..=f.grid_size()).map(|i| f.time(i)).collect();
    times.extend((0..=g.grid_size()).map(|i| g.time(i)));
    times.push(horizon);
    let sup = times.iter().fold(S::zero(), |acc, &t| acc.max((f.at(t) - g.at(t)).abs()));
    (f.lifetime - g.lifetime).abs() + sup
}

/// A draw of the limit law of the scheme, sizes, node labels and root offset.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeLimitSample<S: Real> {
    pub scheme: GTree,
    /// Per half-edge; sums to 1.
    pub m: Vec<S>,
    /// Per half-edge; equal on both halves of an edge.
    pub sigma: Vec<S>,
    /// Per scheme vertex; zero at the root origin.
    pub node_labels: Vec<S>,
    pub u: S,
}

impl<S: Real> SchemeLimitSample<S> {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::IncompatibleQuadruple(s.into()));
        let total = self.m.iter().fold(S::zero(), |a, &b| a + b);
        if (total - S::one()).abs() > real(1e-9) || self.m.iter().any(|&x| x < S::zero()) {
            return bad("sizes do not lie on the simplex");
        }
        if self.sigma.iter().any(|&s| !(s > S::zero())) {
            return bad("lengths must be positive");
        }
        if (0..self.sigma.len()).any(|h| self.sigma[h] != self.sigma[h ^ 1]) {
            return bad("lengths differ on the two halves of an edge");
        }
        let sm = self.scheme.map();
        if self.node_labels[sm.vertex_of(sm.root())] != S::zero() {
            return bad("root node label must be 0");
        }
        if !(self.u >= S::zero() && self.u < self.m[sm.root()]) {
            return bad("root offset outside the root side");
        }
        Ok(())
    }

    pub fn to_json(&self) -> SchemeLimitJson {
        let f = |v: &[S]| v.iter().map(|x| x.to_f64().unwrap()).collect();
        SchemeLimitJson {
            scheme: self.scheme.gluing_word(),
            m: f(&self.m),
            sigma: f(&self.sigma),
            node_labels: f(&self.node_labels),
            u: self.u.to_f64().unwrap(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeLimitJson {
    pub scheme: Vec<usize>,
    pub m: Vec<f64>,
    pub sigma: Vec<f64>,
    pub node_labels: Vec<f64>,
    pub u: f64,
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if d <= 0.0 {
                    return Err(Error::CovarianceNotPsd);
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Weighted Laplacian of the scheme with conductance `1/σ^e` per non-loop
/// edge, with the row and column of vertex `root` removed. Row `i` stands
/// for vertex `i` if `i < root`, else `i + 1`.
pub fn reduced_laplacian(scheme: &GTree, sigma_edge: &[f64], root: usize) -> Vec<Vec<f64>> {
    let sm = scheme.map();
    let v = sm.vertex_count();
    let mut full = vec![vec![0.0; v]; v];
    for (e, &s) in sigma_edge.iter().enumerate() {
        let a = sm.vertex_of(2 * e);
        let b = sm.vertex_of(2 * e + 1);
        if a != b {
            let c = 1.0 / s;
            full[a][a] += c;
            full[b][b] += c;
            full[a][b] -= c;
            full[b][a] -= c;
        }
    }
    let keep: Vec<usize> = (0..v).filter(|&x| x != root).collect();
    keep.iter().map(|&i| keep.iter().map(|&j| full[i][j]).collect()).collect()
}

/// Node labels with density `∝ Π_e g_{σ^e}(l^{e+} - l^{e-})`, root origin at 0:
/// a Gaussian field with the weighted Laplacian as precision.
pub fn sample_node_labels<R: Rng + ?Sized>(scheme: &GTree, sigma_edge: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let sm = scheme.map();
    let root = sm.vertex_of(sm.root());
    let lap = reduced_laplacian(scheme, sigma_edge, root);
    let l = cholesky(&lap)?;
    let n = lap.len();
    // Precision P = L Lᵀ; x = L^{-T} z has covariance P^{-1}.
    let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k][i] * x[k]).sum();
        x[i] = (z[i] - s) / l[i][i];
    }
    let mut out = vec![0.0; sm.vertex_count()];
    for (i, xi) in x.into_iter().enumerate() {
        out[if i < root { i } else { i + 1 }] = xi;
    }
    Ok(out)
}

fn ln_gauss(a: f64, x: f64) -> f64 {
    -0.5 * (2.0 * std::f64::consts::PI * a).ln() - x * x / (2.0 * a)
}

/// `ln(-g'_a(x)) = ln(x / a) + ln g_a(x)` for `x > 0`.
fn ln_minus_gauss_derivative(a: f64, x: f64) -> f64 {
    (x / a).ln() + ln_gauss(a, x)
}

/// Log of `∫ Π_e g_{σ^e}(l^e) dl` over the labels of the non-root vertices.
pub fn ln_label_integral(scheme: &GTree, sigma_edge: &[f64]) -> Result<f64> {
    let sm = scheme.map();
    let root = sm.vertex_of(sm.root());
    let lap = reduced_laplacian(scheme, sigma_edge, root);
    let l = cholesky(&lap)?;
    let ln_det: f64 = (0..lap.len()).map(|i| 2.0 * l[i][i].ln()).sum();
    let two_pi = 2.0 * std::f64::consts::PI;
    let edges: f64 = sigma_edge.iter().map(|&s| -0.5 * (two_pi * s).ln()).sum();
    Ok(edges + 0.5 * lap.len() as f64 * two_pi.ln() - 0.5 * ln_det)
}

/// One weighted proposal of the importance sampler for `μ`.
#[derive(Debug, Clone)]
pub struct MuProposal {
    pub scheme: usize,
    pub m: Vec<f64>,
    pub sigma_edge: Vec<f64>,
    /// Log of target density over proposal density.
    pub ln_weight: f64,
}

/// Draws a proposal: scheme uniform among the rooted dominant schemes, edge
/// masses Dirichlet(1/2) split uniformly between the two sides, and each
/// edge length from the Maxwell law with scale `m^e m^ē / (m^e + m^ē)`.
pub fn propose_mu<R: Rng + ?Sized>(schemes: &[GTree], rng: &mut R) -> MuProposal {
    let si = rng.random_range(0..schemes.len());
    let s = &schemes[si];
    let sm = s.map();
    let edges = sm.edge_count();
    let gamma = Gamma::new(0.5, 1.0).expect("valid shape");
    let raw: Vec<f64> = (0..edges).map(|_| gamma.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let t: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let mut m = vec![0.0; 2 * edges];
    let mut sigma_edge = vec![0.0; edges];
    let mut ln_q = -(schemes.len() as f64).ln();
    // Dirichlet(1/2, ..., 1/2) density.
    ln_q += statrs::function::gamma::ln_gamma(0.5 * edges as f64)
        - edges as f64 * statrs::function::gamma::ln_gamma(0.5);
    for e in 0..edges {
        let u: f64 = rng.random();
        m[2 * e] = t[e] * u;
        m[2 * e + 1] = t[e] * (1.0 - u);
        let v = m[2 * e] * m[2 * e + 1] / t[e];
        let chi: f64 = (0..3).map(|_| StandardNormal.sample(rng)).map(|z: f64| z * z).sum::<f64>().sqrt();
        let s = v.sqrt() * chi;
        sigma_edge[e] = s;
        ln_q += -0.5 * t[e].ln() - t[e].ln();
        // Maxwell density sqrt(2/π) s² exp(-s²/2v) / v^{3/2}.
        ln_q += 0.5 * (2.0 / std::f64::consts::PI).ln() + 2.0 * s.ln() - s * s / (2.0 * v) - 1.5 * v.ln();
    }
    let root = sm.root();
    let mut ln_f = m[root].ln();
    for h in 0..2 * edges {
        ln_f += ln_minus_gauss_derivative(m[h], sigma_edge[h / 2]);
    }
    ln_f += ln_label_integral(s, &sigma_edge).unwrap_or(f64::NEG_INFINITY);
    MuProposal { scheme: si, m, sigma_edge, ln_weight: ln_f - ln_q }
}

/// Proposals per draw of [`sample_mu`].
pub const MU_POOL: usize = 512;

/// Approximate draw from `μ` by sampling-importance-resampling over
/// [`MU_POOL`] proposals; node labels and root offset are then exact given
/// the scheme and sizes.
pub fn sample_mu<S: Real, R: Rng + ?Sized>(g: usize, rng: &mut R) -> Result<SchemeLimitSample<S>> {
    sample_mu_pooled(g, MU_POOL, rng)
}

pub fn sample_mu_pooled<S: Real, R: Rng + ?Sized>(g: usize, pool: usize, rng: &mut R) -> Result<SchemeLimitSample<S>> {
    let schemes = dominant_cache(g)?;
    let props: Vec<MuProposal> = (0..pool.max(1)).map(|_| propose_mu(schemes, rng)).collect();
    let max = props.iter().map(|p| p.ln_weight).fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = props.iter().map(|p| (p.ln_weight - max).exp()).collect();
    let p = &props[crate::forest::pick_weighted_f64(&w, rng)];
    let scheme = schemes[p.scheme].clone();
    let labels = sample_node_labels(&scheme, &p.sigma_edge, rng)?;
    let root = scheme.map().root();
    let u = rng.random::<f64>() * p.m[root];
    let conv = |v: &[f64]| v.iter().map(|&x| real::<S>(x)).collect::<Vec<_>>();
    let sigma: Vec<f64> = (0..p.m.len()).map(|h| p.sigma_edge[h / 2]).collect();
    Ok(SchemeLimitSample {
        scheme,
        m: conv(&p.m),
        sigma: conv(&sigma),
        node_labels: conv(&labels),
        u: real(u),
    })
}

fn dominant_cache(g: usize) -> Result<&'static [GTree]> {
    use std::sync::OnceLock;
    static CACHE: [OnceLock<Vec<GTree>>; crate::scheme::MAX_SCHEME_GENUS + 1] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if g == 0 {
        return Err(Error::GenusZero);
    }
    if g >= CACHE.len() {
        return Err(Error::GenusOutOfRange(g));
    }
    if CACHE[g].get().is_none() {
        let v = dominant_schemes(g)?;
        let _ = CACHE[g].set(v);
    }
    Ok(CACHE[g].get().expect("initialized"))
}

/// Importance-sampling estimate of the normalizing constant `Υ` of `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpsilonEstimate {
    pub value: f64,
    pub std_error: f64,
    pub draws: usize,
}

pub fn estimate_upsilon<R: Rng + ?Sized>(g: usize, draws: usize, rng: &mut R) -> Result<UpsilonEstimate> {
    let schemes = dominant_cache(g)?;
    let w: Vec<f64> = (0..draws).map(|_| propose_mu(schemes, rng).ln_weight.exp()).collect();
    let n = draws as f64;
    let mean = w.iter().sum::<f64>() / n;
    let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(UpsilonEstimate { value: mean, std_error: (var / n).sqrt(), draws })
}

/// Rescaled statistics around the root half-edge `e*` of a scheme, read
/// from its side: the length `σ`, the side `m`, the tallest tree and the
/// largest absolute label of the root forest, the height and the label at a
/// uniform time, then the root offset `u` and the label increment across
/// `e*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootStatistics {
    pub sigma: f64,
    pub m: f64,
    pub height: f64,
    pub label_range: f64,
    pub height_at_uniform: f64,
    pub label_at_uniform: f64,
    pub u: f64,
    pub label_increment: f64,
}

impl RootStatistics {
    pub const NAMES: [&'static str; 8] = [
        "sigma",
        "m",
        "height",
        "label_range",
        "height_at_uniform",
        "label_at_uniform",
        "u",
        "label_increment",
    ];

    /// Spacing of each rescaled discrete statistic at size `n`.
    pub fn lattice_steps(n: usize) -> [f64; 8] {
        let nf = n as f64;
        let (space, label) = (1.0 / (2.0 * nf).sqrt(), 1.0 / crate::geometry::distance_scale(n));
        [space, 1.0 / (2.0 * nf), space, label, space, label, 1.0 / (2.0 * nf), label]
    }

    pub fn values(&self) -> [f64; 8] {
        [
            self.sigma,
            self.m,
            self.height,
            self.label_range,
            self.height_at_uniform,
            self.label_at_uniform,
            self.u,
            self.label_increment,
        ]
    }
}

/// Height above the running minimum, and its supremum.
fn heights<T: Copy + PartialOrd + std::ops::Sub<Output = T>>(c: &[T]) -> Vec<T> {
    let mut inf = c[0];
    c.iter()
        .map(|&v| {
            if v < inf {
                inf = v;
            }
            v - inf
        })
        .collect()
}

/// Root statistics of a labelled g-tree with `C` rescaled by `√(2n)`, `L` by
/// `γ n^{1/4}` and contour times by `2n`; `None` unless its scheme is
/// dominant.
pub fn discrete_root_statistics<R: Rng + ?Sized>(t: &WellLabeledGTree, rng: &mut R) -> Result<Option<RootStatistics>> {
    let d = decompose_labeled(t)?;
    if !is_dominant(&d.scheme) {
        return Ok(None);
    }
    let n = t.n() as f64;
    let (time, space) = (2.0 * n, (2.0 * n).sqrt());
    let label = crate::geometry::distance_scale(t.n());
    let r = d.root();
    let sigma = d.sigma(r);
    let cp = d.forests[r].contour_pair();
    let h = heights(&cp.c);
    let i = rng.random_range(0..cp.c.len());
    Ok(Some(RootStatistics {
        sigma: sigma as f64 / space,
        m: (2 * d.m(r) + sigma) as f64 / time,
        height: *h.iter().max().unwrap() as f64 / space,
        label_range: cp.l.iter().map(|l| l.abs()).max().unwrap() as f64 / label,
        height_at_uniform: h[i] as f64 / space,
        label_at_uniform: cp.l[i] as f64 / label,
        u: d.u as f64 / time,
        label_increment: d.label_increment(r) as f64 / label,
    }))
}

/// Root statistics of a draw of `μ` completed by a snake head on the root
/// side, sampled with time step at most `dt`.
pub fn continuum_root_statistics<R: Rng + ?Sized>(g: usize, dt: f64, rng: &mut R) -> Result<RootStatistics> {
    let mu = sample_mu::<f64, R>(g, rng)?;
    let sm = mu.scheme.map();
    let r = sm.root();
    let grid = ((mu.m[r] / dt).ceil() as usize).max(1);
    let (f, z) = sample_snake_head(mu.m[r], mu.sigma[r], grid, rng)?;
    let h = heights(&f.values);
    let i = rng.random_range(0..f.values.len());
    Ok(RootStatistics {
        sigma: mu.sigma[r],
        m: mu.m[r],
        height: h.iter().copied().fold(0.0, f64::max),
        label_range: z.values.iter().fold(0.0, |a, v| a.max(v.abs())),
        height_at_uniform: h[i],
        label_at_uniform: z.values[i],
        u: mu.u,
        label_increment: mu.node_labels[sm.target_of(r)] - mu.node_labels[sm.vertex_of(r)],
    })
}

/// One two-sample KS test per root statistic and genus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub genus: usize,
    pub statistic: String,
    pub result: TestResult,
}

/// Compares `samples` exact uniform labelled g-trees of size `n` with
/// dominant schemes against `samples` continuum draws, statistic by
/// statistic. The continuum paths share the time step `1/(2n)` of the
/// discrete contour, and the discrete values are spread uniformly over
/// their lattice cell, so that ties do not bias the KS statistic.
pub fn cross_check<R: Rng + ?Sized>(
    g: usize,
    n: usize,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<CrossCheck>> {
    let mut discrete = Vec::with_capacity(samples);
    while discrete.len() < samples {
        let t = sample_wl_gtree_exact(g, n, rng)?;
        if let Some(s) = discrete_root_statistics(&t, rng)? {
            let mut v = s.values();
            for (x, step) in v.iter_mut().zip(RootStatistics::lattice_steps(n)) {
                *x += (rng.random::<f64>() - 0.5) * step;
            }
            discrete.push(v);
        }
    }
    let continuum = (0..samples)
        .map(|_| continuum_root_statistics(g, 0.5 / n as f64, rng).map(|s| s.values()))
        .collect::<Result<Vec<_>>>()?;
    Ok(RootStatistics::NAMES
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let a: Vec<f64> = discrete.iter().map(|v| v[k]).collect();
            let b: Vec<f64> = continuum.iter().map(|v| v[k]).collect();
            CrossCheck {
                genus: g,
                statistic: name.to_string(),
                result: ks_two_sample(&a, &b),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng(seed: u64) -> crate::Rng {
        crate::Rng::seed_from_u64(seed)
    }

    #[test]
    fn one_step_bridge_is_its_endpoints() {
        let b = sample_brownian_bridge(2.0f64, 1.0, -1.0, 1, &mut rng(1)).unwrap();
        assert_eq!(b.values, vec![1.0, -1.0]);
    }

    #[test]
    fn fp_bridge_endpoints() {
        let mut r = rng(2);
        for _ in 0..20 {
            let f = sample_fp_bridge(1.0f64, 0.7, 50, &mut r).unwrap();
            assert_eq!(f.values[0], 0.0);
            assert_eq!(*f.values.last().unwrap(), -0.7);
            assert!(f.values[..50].iter().all(|&v| v > -0.7));
        }
    }

    #[test]
    fn snake_vanishes_on_the_floor() {
        let mut r = rng(3);
        let (f, z) = sample_snake_head(1.0f64, 1.0, 200, &mut r).unwrap();
        let mut inf = f64::INFINITY;
        for (i, &v) in f.values.iter().enumerate() {
            inf = inf.min(v);
            if v == inf {
                assert_eq!(z.values[i], 0.0);
            }
        }
    }

    #[test]
    fn dk_examples() {
        let a = PathSample::new(1.0f64, vec![0.0, 0.0]).unwrap();
        let b = PathSample::new(2.0f64, vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(d_k(&a, &a), 0.0);
        assert_eq!(d_k(&a, &b), 1.0);
    }

    #[test]
    fn mu_draws_satisfy_constraints() {
        let mut r = rng(4);
        for g in 1..=2 {
            for _ in 0..10 {
                let s: SchemeLimitSample<f64> = sample_mu_pooled(g, 32, &mut r).unwrap();
                s.validate().unwrap();
            }
        }
    }

    #[test]
    fn f32_paths() {
        let b = sample_brownian_bridge(1.0f32, 0.0, 0.0, 10, &mut rng(5)).unwrap();
        assert_eq!(b.values.len(), 11);
    }
}
