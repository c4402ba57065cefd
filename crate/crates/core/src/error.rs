use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("singular boundary condition at mode {mode}: free-constant coefficient {coefficient:e} is too small")]
    SingularBoundary { mode: usize, coefficient: f64 },

    #[error("all non-translation modes vanish: the polygon is a single point")]
    AllModesZero,

    #[error("no such solution: {0}")]
    NoSuchSolution(String),

    #[error("mode 0 only yields the trivial (stationary point) solution")]
    TrivialMode,

    #[error("initial polygon has coefficient mass {mass:e} outside modes {k} and n-{k}")]
    SpanViolation { k: usize, mass: f64 },

    #[error("damping beta = {beta} does not converge to the target; request the non-convergent mode explicitly")]
    NonConvergentMode { beta: f64 },

    #[error("evaluation at t = {t} overflows (exponent {exponent:.1} exceeds 700)")]
    Range { t: f64, exponent: f64 },

    #[error("quadrature step h = {h} too coarse for t = {t} (requires h <= t/16)")]
    QuadratureStep { h: f64, t: f64 },

    #[error("{0} waypoints requested; a second-order flow supports one waypoint beyond the initial state")]
    TooManyWaypoints(usize),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),

    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("empty trajectory")]
    EmptyTrajectory,
}

impl Error {
    /// Short machine-readable tag, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DOMAIN",
            Error::DimensionMismatch { .. } => "DIMENSION",
            Error::SingularBoundary { .. } => "SINGULAR_BOUNDARY",
            Error::AllModesZero => "ALL_MODES_ZERO",
            Error::NoSuchSolution(_) => "NO_SUCH_SOLUTION",
            Error::TrivialMode => "TRIVIAL_MODE",
            Error::SpanViolation { .. } => "SPAN_VIOLATION",
            Error::NonConvergentMode { .. } => "NON_CONVERGENT",
            Error::Range { .. } => "RANGE",
            Error::QuadratureStep { .. } => "QUADRATURE_STEP",
            Error::TooManyWaypoints(_) => "TOO_MANY_WAYPOINTS",
            Error::InvalidStrategy(_) => "INVALID_STRATEGY",
            Error::Parse { .. } => "PARSE",
            Error::Io(_) => "IO",
            Error::NonFinite { .. } => "NON_FINITE",
            Error::EmptyTrajectory => "EMPTY_TRAJECTORY",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn mismatch(expected: impl ToString, got: impl ToString) -> Error {
    Error::DimensionMismatch {
        expected: expected.to_string(),
        got: got.to_string(),
    }
}
