//! Bipartite quadrangulations of genus g and the bijections that encode them.
//!
//! The crate covers the half-edge map substrate ([`map`]), one-face maps and
//! their labellings ([`gtree`]), forests and Motzkin paths ([`forest`]),
//! scheme decompositions ([`scheme`]), the labelled-tree/quadrangulation
//! bijection ([`cms`]), the opening of g-trees into plane trees with triples
//! ([`chapuy`]), uniform samplers ([`sampling`]), exhaustive enumeration
//! ([`enumerate`]), metric statistics ([`geometry`]) and samplers for the
//! continuum limit objects ([`continuum`]).

pub mod chapuy;
pub mod cms;
pub mod continuum;
pub mod enumerate;
pub mod error;
pub mod forest;
pub mod geometry;
pub mod gtree;
pub mod map;
pub mod sampling;
pub mod scheme;
pub mod stats;
pub mod weight;

pub use error::{Error, Result};
pub use forest::{ContourPair, Forest, MotzkinPath, WellLabeledForest};
pub use gtree::{GTree, WellLabeledGTree};
pub use map::{CombinatorialMap, FaceDecomposition};

/// Floating-point scalars accepted by the continuum samplers and statistics.
pub trait Real:
    num_traits::Float + num_traits::FromPrimitive + num_traits::FloatConst + std::fmt::Debug + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

pub type PathSample64 = continuum::PathSample<f64>;
pub type PathSample32 = continuum::PathSample<f32>;
pub type SchemeLimitSample64 = continuum::SchemeLimitSample<f64>;

/// Deterministic generator used throughout: ChaCha with 8 rounds.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Name of the generator algorithm, echoed in run manifests.
pub const RNG_ALGORITHM: &str = "ChaCha8";

/// Generator for worker `stream` of a run seeded with `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> Rng {
    use rand::SeedableRng;
    let mut rng = Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
