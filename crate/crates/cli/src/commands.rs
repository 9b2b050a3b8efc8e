//! Subcommand implementations. Each returns its primary output as bytes plus
//! a JSON summary; `main` writes the output and the manifest.

use std::io::Read;

use quadgenus::chapuy::{glue, intertwined_counts_along, open, opening_sequences, TreeWithTriples, TreeWithTriplesJson};
use quadgenus::cms::{
    check_distance_bound, cms_forward, cms_forward_image, cms_inverse, distance_label_identity,
    PointedQuadrangulation, PointedQuadrangulationJson,
};
use quadgenus::enumerate::{enumerate_gtrees, enumerate_labeled_gtrees, enumerate_pointed_quadrangulations};
use quadgenus::geometry::{ball_volume_exponent, bfs_distances, fit_distance_exponent, sampler_for, two_point_samples};
use quadgenus::gtree::GTreeJson;
use quadgenus::sampling::{Mode, SamplerConfig};
use quadgenus::scheme::{decompose_labeled, recompose_labeled, Decomposition, DecompositionJson};
use quadgenus::{rng_stream, Error, WellLabeledGTree};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

/// Largest `--max-n` accepted by `verify`.
pub const MAX_VERIFY_N: usize = 6;

/// Largest map size accepted by `sample` and `experiment`.
pub const MAX_SIZE: usize = 1 << 20;

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn bad_input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    /// A library error raised while validating input.
    pub fn input(e: Error) -> Self {
        match e.exit_code() {
            3 => e.into(),
            _ => Self::bad_input(e.to_string()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self { code: e.exit_code(), message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::bad_input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self::bad_input(format!("malformed JSON: {e}"))
    }
}

pub type Outcome<T> = Result<T, Failure>;

/// What a command produced.
pub struct Run {
    pub output: Vec<u8>,
    pub schema: &'static str,
    pub summary: Value,
    /// Non-zero when the command completed but found violations.
    pub status: i32,
}

fn json_lines(items: &[String]) -> Outcome<Vec<u8>> {
    let mut out = Vec::new();
    for x in items {
        out.extend_from_slice(x.as_bytes());
        out.push(b'\n');
    }
    Ok(out)
}

fn parse_lines<T: serde::de::DeserializeOwned>(input: &str) -> Outcome<Vec<T>> {
    input
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(k, l)| serde_json::from_str(l).map_err(|e| Failure::bad_input(format!("line {}: {e}", k + 1))))
        .collect()
}

pub fn read_input(path: Option<&std::path::Path>) -> Outcome<String> {
    let mut s = String::new();
    match path {
        Some(p) => s = std::fs::read_to_string(p)?,
        None => {
            std::io::stdin().read_to_string(&mut s)?;
        }
    }
    Ok(s)
}

fn guard_size(n: usize) -> Outcome<()> {
    if n > MAX_SIZE {
        return Err(Error::TooLarge { n, limit: MAX_SIZE }.into());
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    /// Well-labelled g-trees.
    Tree,
    /// Pointed quadrangulations.
    Quad,
}

pub struct SampleArgs {
    pub genus: usize,
    pub size: usize,
    pub mode: Mode,
    pub seed: u64,
    pub count: usize,
    pub kind: SampleKind,
    pub exact_limit: usize,
}

/// Object `k` is drawn from stream `k` of the seed.
pub fn sample(a: &SampleArgs) -> Outcome<Run> {
    guard_size(a.size)?;
    let cfg = SamplerConfig { exact_limit: a.exact_limit, ..SamplerConfig::new(a.genus, a.size, a.seed, a.mode) };
    cfg.validate().map_err(Failure::input)?;
    let lines: Vec<String> = (0..a.count)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_stream(a.seed, k as u64);
            Ok(match a.kind {
                SampleKind::Tree => serde_json::to_string(&cfg.sample_tree(&mut rng)?.to_json())?,
                SampleKind::Quad => serde_json::to_string(&cfg.sample_pointed(&mut rng)?.to_json())?,
            })
        })
        .collect::<Outcome<_>>()?;
    Ok(Run {
        output: json_lines(&lines)?,
        schema: match a.kind {
            SampleKind::Tree => "gtree-jsonl/1",
            SampleKind::Quad => "pointed-quadrangulation-jsonl/1",
        },
        summary: json!({ "objects": a.count }),
        status: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Via {
    /// Labelled g-tree and sign to pointed quadrangulation.
    Cms,
    /// Labelled g-tree to plane tree with triples.
    Chapuy,
    /// Labelled g-tree to scheme decomposition.
    Decomposition,
}

pub struct ConvertArgs {
    pub via: Via,
    pub inverse: bool,
    pub epsilon: i8,
    pub sequence: usize,
}

fn parse_tree(j: &GTreeJson) -> Outcome<WellLabeledGTree> {
    WellLabeledGTree::from_json(j).map_err(Failure::input)
}

pub fn convert(a: &ConvertArgs, input: &str) -> Outcome<Run> {
    if a.epsilon != 1 && a.epsilon != -1 {
        return Err(Failure::bad_input("epsilon must be +1 or -1"));
    }
    let (lines, schema): (Vec<String>, _) = match (a.via, a.inverse) {
        (Via::Cms, false) => (
            parse_lines::<GTreeJson>(input)?
                .iter()
                .map(|j| Ok(serde_json::to_string(&cms_forward(&parse_tree(j)?, a.epsilon).to_json())?))
                .collect::<Outcome<_>>()?,
            "pointed-quadrangulation-jsonl/1",
        ),
        (Via::Cms, true) => (
            parse_lines::<PointedQuadrangulationJson>(input)?
                .iter()
                .map(|j| {
                    let pq = PointedQuadrangulation::from_json(j).map_err(Failure::input)?;
                    Ok(serde_json::to_string(&cms_inverse(&pq).map_err(Failure::input)?.0.to_json())?)
                })
                .collect::<Outcome<_>>()?,
            "gtree-jsonl/1",
        ),
        (Via::Chapuy, false) => (
            parse_lines::<GTreeJson>(input)?
                .iter()
                .map(|j| {
                    let t = parse_tree(j)?;
                    let seqs = opening_sequences(&t.tree).map_err(Failure::input)?;
                    let seq = seqs.get(a.sequence).ok_or_else(|| {
                        Failure::bad_input(format!("sequence {} of {} requested", a.sequence, seqs.len()))
                    })?;
                    Ok(serde_json::to_string(&open(&t, seq).map_err(Failure::input)?.to_json())?)
                })
                .collect::<Outcome<_>>()?,
            "tree-with-triples-jsonl/1",
        ),
        (Via::Chapuy, true) => (
            parse_lines::<TreeWithTriplesJson>(input)?
                .iter()
                .map(|j| {
                    let w = TreeWithTriples::from_json(j).map_err(Failure::input)?;
                    Ok(serde_json::to_string(&glue(&w).map_err(Failure::input)?.0.to_json())?)
                })
                .collect::<Outcome<_>>()?,
            "gtree-jsonl/1",
        ),
        (Via::Decomposition, false) => (
            parse_lines::<GTreeJson>(input)?
                .iter()
                .map(|j| Ok(serde_json::to_string(&decompose_labeled(&parse_tree(j)?).map_err(Failure::input)?.to_json())?))
                .collect::<Outcome<_>>()?,
            "decomposition-jsonl/1",
        ),
        (Via::Decomposition, true) => (
            parse_lines::<DecompositionJson>(input)?
                .iter()
                .map(|j| {
                    let d = Decomposition::from_json(j).map_err(Failure::input)?;
                    Ok(serde_json::to_string(&recompose_labeled(&d).map_err(Failure::input)?.to_json())?)
                })
                .collect::<Outcome<_>>()?,
            "gtree-jsonl/1",
        ),
    };
    Ok(Run { summary: json!({ "objects": lines.len() }), output: json_lines(&lines)?, schema, status: 0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Bijection round trips in both directions.
    Roundtrip,
    /// Genus and vertex count of every image.
    Euler,
    /// Distance bound over all corner pairs.
    Bound,
    /// Distances to the base point equal shifted labels.
    Labels,
    /// Opening and gluing along every opening sequence.
    Chapuy,
}

/// Violations found in one tree.
fn verify_tree(suite: Suite, t: &WellLabeledGTree, g: usize, n: usize) -> usize {
    let both = [-1i8, 1];
    match suite {
        Suite::Roundtrip => {
            let cms = both.iter().filter(|&&e| cms_inverse(&cms_forward(t, e)).ok() != Some((t.clone(), e))).count();
            let dec = g > 0 && decompose_labeled(t).and_then(|d| recompose_labeled(&d)).ok().as_ref() != Some(t);
            cms + dec as usize
        }
        Suite::Euler => both
            .iter()
            .filter(|&&e| {
                let q = cms_forward(t, e).map;
                t.genus() != g
                    || q.genus() != g
                    || q.vertex_count() != n + 2 - 2 * g
                    || !q.is_bipartite_quadrangulation()
            })
            .count(),
        Suite::Bound => both
            .iter()
            .map(|&e| {
                let image = cms_forward_image(t, e);
                let map = &image.quadrangulation.map;
                (0..2 * n)
                    .map(|i| {
                        let d = bfs_distances(map, image.vertex_of_tree_vertex[t.tree.tr(i)]);
                        (0..2 * n).filter(|&j| check_distance_bound(t, &image, &d, i, j).is_err()).count()
                    })
                    .sum::<usize>()
            })
            .sum(),
        Suite::Labels => both.iter().filter(|&&e| !distance_label_identity(t, &cms_forward_image(t, e))).count(),
        Suite::Chapuy => {
            let Ok(seqs) = opening_sequences(&t.tree) else { return 0 };
            let want: Vec<usize> = (0..=g).rev().map(|k| 2 * k).collect();
            seqs.iter()
                .filter(|s| {
                    intertwined_counts_along(&t.tree, s).ok().as_ref() != Some(&want)
                        || open(t, s).and_then(|w| glue(&w)).ok() != Some((t.clone(), s.to_vec()))
                })
                .count()
        }
    }
}

/// Runs `suite` over every well-labelled g-tree with at most `max_n` edges.
pub fn verify(suite: Suite, genus: usize, max_n: usize) -> Outcome<Run> {
    if max_n > MAX_VERIFY_N {
        return Err(Error::TooLarge { n: max_n, limit: MAX_VERIFY_N }.into());
    }
    if genus > quadgenus::sampling::MAX_GENUS {
        return Err(Error::GenusOutOfRange(genus).into());
    }
    let mut checked = 0;
    let mut skipped = 0;
    let mut violations = 0;
    for n in (2 * genus).max(1)..=max_n {
        let trees = enumerate_labeled_gtrees(genus, n)?;
        let applicable: Vec<&WellLabeledGTree> = trees
            .iter()
            .filter(|t| suite != Suite::Chapuy || (genus > 0 && opening_sequences(&t.tree).is_ok()))
            .collect();
        skipped += trees.len() - applicable.len();
        checked += applicable.len();
        violations += applicable.par_iter().map(|t| verify_tree(suite, t, genus, n)).sum::<usize>();
        if suite == Suite::Roundtrip && n <= quadgenus::enumerate::MAX_QUADRANGULATION_N {
            let quads = enumerate_pointed_quadrangulations(genus, n)?;
            violations += (quads.len() != 2 * trees.len()) as usize;
            violations += quads
                .par_iter()
                .filter(|(m, b)| {
                    let Ok(pq) = PointedQuadrangulation::new(m.clone(), *b) else { return true };
                    cms_inverse(&pq).map(|(t, e)| cms_forward(&t, e) != pq.canonical()).unwrap_or(true)
                })
                .count();
            checked += quads.len();
        }
    }
    let summary = json!({
        "suite": suite, "genus": genus, "max_n": max_n,
        "checked": checked, "skipped": skipped, "violations": violations,
    });
    let mut output = serde_json::to_vec(&summary)?;
    output.push(b'\n');
    Ok(Run { output, schema: "verify-summary/1", summary, status: if violations == 0 { 0 } else { 1 } })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    /// Mean distance against size, with a log-log exponent fit.
    Scaling,
    /// Ball volume growth inside single maps.
    Dimension,
    /// Rescaled distances between uniform vertex pairs.
    Twopoint,
}

pub struct ExperimentArgs {
    pub kind: Experiment,
    pub genus: usize,
    pub sizes: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub centers: usize,
    pub pairs: usize,
}

/// Map `k` of size index `i` uses stream `i * reps + k`.
fn per_map<T, F>(a: &ExperimentArgs, f: F) -> Outcome<Vec<Vec<T>>>
where
    T: Send,
    F: Fn(&PointedQuadrangulation, &mut quadgenus::Rng) -> Outcome<T> + Sync,
{
    a.sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let cfg = sampler_for(a.genus, n, a.seed);
            cfg.validate().map_err(Failure::input)?;
            (0..a.reps)
                .into_par_iter()
                .map(|k| {
                    let mut rng = rng_stream(a.seed, (i * a.reps + k) as u64);
                    let pq = cfg.sample_pointed(&mut rng)?;
                    f(&pq, &mut rng)
                })
                .collect()
        })
        .collect()
}

pub fn experiment(a: &ExperimentArgs) -> Outcome<Run> {
    if a.sizes.is_empty() || a.reps == 0 {
        return Err(Failure::bad_input("need at least one size and one repetition"));
    }
    for &n in &a.sizes {
        guard_size(n)?;
    }
    match a.kind {
        Experiment::Scaling => {
            let r = fit_distance_exponent(a.genus, &a.sizes, a.reps, &mut rng_stream(a.seed, 0)).map_err(|e| match e {
                Error::InsufficientSizes(_) => Failure::input(e),
                e => e.into(),
            })?;
            Ok(Run {
                output: r.to_csv().into_bytes(),
                schema: "scaling-csv/1",
                summary: json!({
                    "exponent": r.exponent,
                    "interval": [r.interval.0, r.interval.1],
                    "gamma": r.gamma,
                    "sizes": r.sizes,
                }),
                status: 0,
            })
        }
        Experiment::Dimension => {
            let fits = per_map(a, |pq, rng| {
                ball_volume_exponent(&pq.map, a.centers, rng).map_err(|e| match e {
                    Error::InsufficientSizes(_) => {
                        Failure::bad_input(format!("size {} leaves fewer than two radii to fit", pq.n()))
                    }
                    e => e.into(),
                })
            })?;
            let mut csv = String::from("genus,n,rep,radius,mean_volume\n");
            let mut slopes = Vec::new();
            for (n, fs) in a.sizes.iter().zip(&fits) {
                for (rep, f) in fs.iter().enumerate() {
                    for (r, v) in f.radii.iter().zip(&f.volumes) {
                        csv.push_str(&format!("{},{n},{rep},{r},{v}\n", a.genus));
                    }
                }
                let mean = fs.iter().map(|f| f.slope).sum::<f64>() / fs.len() as f64;
                slopes.push(json!({ "n": n, "mean_slope": mean }));
            }
            Ok(Run { output: csv.into_bytes(), schema: "dimension-csv/1", summary: json!({ "slopes": slopes }), status: 0 })
        }
        Experiment::Twopoint => {
            let samples = per_map(a, |pq, rng| Ok(two_point_samples(&pq.map, rng, a.pairs)))?;
            let mut csv = String::from("genus,n,rep,pair,rescaled_distance\n");
            let mut means = Vec::new();
            for (n, reps) in a.sizes.iter().zip(&samples) {
                for (rep, xs) in reps.iter().enumerate() {
                    for (p, x) in xs.iter().enumerate() {
                        csv.push_str(&format!("{},{n},{rep},{p},{x}\n", a.genus));
                    }
                }
                let all: Vec<f64> = reps.iter().flatten().copied().collect();
                means.push(json!({ "n": n, "mean": all.iter().sum::<f64>() / all.len().max(1) as f64 }));
            }
            Ok(Run { output: csv.into_bytes(), schema: "twopoint-csv/1", summary: json!({ "means": means }), status: 0 })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnumerateKind {
    /// Unlabelled g-trees as gluing words.
    Gtrees,
    /// Well-labelled g-trees.
    Labelled,
    /// Pointed bipartite quadrangulations.
    Quadrangulations,
}

pub fn enumerate(kind: EnumerateKind, genus: usize, size: usize) -> Outcome<Run> {
    let (lines, schema): (Vec<String>, _) = match kind {
        EnumerateKind::Gtrees => (
            enumerate_gtrees(genus, size)?.iter().map(|t| json!({ "word": t.gluing_word() }).to_string()).collect(),
            "gtree-word-jsonl/1",
        ),
        EnumerateKind::Labelled => (
            enumerate_labeled_gtrees(genus, size)?
                .iter()
                .map(|t| serde_json::to_string(&t.to_json()))
                .collect::<Result<_, _>>()?,
            "gtree-jsonl/1",
        ),
        EnumerateKind::Quadrangulations => (
            enumerate_pointed_quadrangulations(genus, size)?
                .into_iter()
                .map(|(m, b)| Ok(serde_json::to_string(&PointedQuadrangulation::new(m, b)?.to_json())?))
                .collect::<Outcome<_>>()?,
            "pointed-quadrangulation-jsonl/1",
        ),
    };
    Ok(Run { summary: json!({ "count": lines.len() }), output: json_lines(&lines)?, schema, status: 0 })
}
