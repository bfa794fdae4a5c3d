use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeometryError>;

/// Failures raised by the geometric layers. Identity violations are never
/// errors; they are reported as residuals in a [`crate::report::CheckReport`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point has a non-finite coordinate at index {0}")]
    NonFinitePoint(usize),

    #[error(
        "metric is singular at the evaluation point (|det| = {det:e}, threshold {threshold:e})"
    )]
    SingularMetric { det: f64, threshold: f64 },

    #[error("plane is degenerate: |g(X,X)g(Y,Y) - g(X,Y)^2| = {0:e}")]
    DegeneratePlane(f64),

    #[error("index q = {q} is not an even integer in [2, 2n-2] for n = {n}")]
    BadSignature { n: usize, q: usize },

    #[error("not a phi-section: {0}")]
    NotPhiSection(String),

    #[error("no sampled triple has a space-form coefficient above {0:e}")]
    IllConditioned(f64),

    #[error("point is not on the hypersurface: |F(p)| = {0:e}")]
    NotOnSurface(f64),

    #[error("defining function has vanishing differential at the point")]
    ZeroGradient,

    #[error("screen complement D0 is degenerate (smallest |eigenvalue| {0:e})")]
    DegenerateScreen(f64),

    #[error("frame validation failed: {name} residual {residual:e} exceeds {tolerance:e}")]
    FrameValidation {
        name: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("vector field `{0}` is not tangent to the hypersurface at the point")]
    NotTangent(String),

    #[error("transversal field failed the smoothness probe (mismatch {0:e})")]
    FrameNotDifferentiable(f64),

    #[error("projection onto the hypersurface did not converge (|F| = {0:e} after 20 steps)")]
    RetractionFailed(f64),

    #[error("no theorem applies: {0}")]
    NotApplicable(String),

    #[error("invalid field: {0}")]
    InvalidField(String),
}
