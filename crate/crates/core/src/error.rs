use std::path::PathBuf;

use num_complex::Complex64;

/// Errors raised by the surface engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("curve is not regular: min speed^2 over samples is {margin:e}")]
    Irregular { margin: f64 },

    #[error("zero of speed^2 at {zero} lies within {distance:e} of the path")]
    SingularityOnPath { zero: Complex64, distance: f64 },

    #[error("square-root continuation lost the branch near {at} after maximum refinement")]
    BranchJump { at: Complex64 },

    #[error("adaptive quadrature on [{a}, {b}] did not reach tolerance {tol:e} within depth {depth}")]
    QuadratureFailure {
        a: Complex64,
        b: Complex64,
        tol: f64,
        depth: usize,
    },

    #[error("requested |Im z| = {requested} exceeds usable half-width {limit}")]
    StripTooWide { requested: f64, limit: f64 },

    #[error("phi1 - i*phi2 = {value} is too small at {at} (pole of g)")]
    DivisionNearZero { at: Complex64, value: Complex64 },

    #[error("order estimate did not converge: successive slopes {slopes:?}")]
    NonConvergent { slopes: Vec<f64> },

    #[error("degenerate first fundamental form (EG - F^2 = {det:e}) at grid vertex ({i}, {j})")]
    DegenerateMetric { i: usize, j: usize, det: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
