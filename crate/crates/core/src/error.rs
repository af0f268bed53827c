use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("polytope is empty")]
    Empty,

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("polytope is not simple (vertex {vertex:?} lies on {active} facets)")]
    NotSimple { vertex: Vec<String>, active: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no canonical two-quadric form within entry bound {bound}")]
    NoCanonicalForm { bound: i64 },

    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("singular orbit Gram matrix (determinant {det:e}); point has a nontrivial stabilizer")]
    SingularGram { det: f64 },

    #[error("degenerate chart: tangent rank {rank} < {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("finite-difference step {0:e} is too small")]
    StepUnderflow(f64),

    #[error("function is not invariant under the torus action (deviation {deviation:e})")]
    InvarianceViolation { deviation: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid double configuration: {0}")]
    InvalidDouble(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown catalog entry '{0}'")]
    UnknownCatalog(String),
}

impl Error {
    pub(crate) fn dim(expected: usize, got: usize) -> Self {
        Error::DimensionMismatch { expected, got }
    }

    /// True for failures of an iterative numerical procedure, as opposed to
    /// bad input or violated preconditions.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::SingularGram { .. }
                | Error::RankDeficient { .. }
                | Error::StepUnderflow(_)
        )
    }

    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::UnknownCatalog(_))
    }
}
