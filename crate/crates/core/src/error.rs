use thiserror::Error;

/// Errors raised across the crate.
///
/// Each variant corresponds to a named failure of one operation; the CLI maps
/// them onto exit codes (see [`Error::exit_code`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("opposite is not a fixed-point-free involution at half-edge {0}")]
    NotInvolution(usize),
    #[error("next_at_vertex is not a permutation: {0}")]
    NotPermutation(String),
    #[error("map is disconnected: reached {reached} of {total} half-edges from the root")]
    Disconnected { reached: usize, total: usize },
    #[error("map has {0} faces, expected exactly one")]
    NotOneFace(usize),
    #[error("bad gluing word: {0}")]
    BadWord(String),
    #[error("root label is {0}, expected 0")]
    RootLabelNonzero(i64),
    #[error("labels jump by {jump} across edge {edge}")]
    EdgeJumpTooLarge { edge: usize, jump: i64 },
    #[error("malformed contour: {0}")]
    MalformedContour(String),
    #[error("endpoint {target} unreachable by a Motzkin path of length {length}")]
    Unreachable { length: usize, target: i64 },
    #[error("genus {0} is outside the supported range")]
    OutOfRange(usize),
    #[error("a genus-0 tree has no scheme")]
    GenusZero,
    #[error("incompatible quadruple: {0}")]
    IncompatibleQuadruple(String),
    #[error("not a bipartite quadrangulation: {0}")]
    NotBipartiteQuadrangulation(String),
    #[error("scheme is not dominant")]
    NonDominantScheme,
    #[error("vertex {0} is not an intertwined node")]
    NotIntertwined(usize),
    #[error("invalid opening sequence: {0}")]
    InvalidOpeningSequence(String),
    #[error("invalid triples: {0}")]
    InvalidTriples(String),
    #[error("size {n} exceeds the limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("size {n} is below the minimum {min} for this genus")]
    TooSmall { n: usize, min: usize },
    #[error("genus {0} out of range for this sampler")]
    GenusOutOfRange(usize),
    #[error("need at least two distinct sizes for a fit, got {0}")]
    InsufficientSizes(usize),
    #[error("covariance matrix is not positive semi-definite")]
    CovarianceNotPsd,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code: 2 for malformed input, 3 for resource guards, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::TooLarge { .. } | Error::OutOfRange(_) | Error::GenusOutOfRange(_) => 3,
            Error::Parse(_)
            | Error::TooSmall { .. }
            | Error::BadWord(_)
            | Error::MalformedContour(_)
            | Error::NotInvolution(_)
            | Error::NotPermutation(_)
            | Error::Disconnected { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
