use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A set description violates its construction invariants.
    InvalidSet(&'static str),
    /// Two objects that must live in the same space do not.
    DimensionMismatch { expected: usize, found: usize },
    /// Time grids are not strictly increasing, do not start at zero or are too short.
    InvalidGrid(&'static str),
    /// Two paths that must share a grid do not.
    GridMismatch,
    /// A controlled path was integrated against a lift it does not reference.
    ReferenceMismatch,
    /// Variation exponents must be at least one.
    InvalidExponent(f64),
    /// A scalar parameter is out of its admissible range.
    InvalidParameter(&'static str),
    /// Dykstra's algorithm did not reach the requested tolerance.
    PolytopeNonConvergence { sweeps: usize, last_change: f64 },
    /// The initial point does not lie in the constraint set at time zero.
    InfeasibleStart { distance: f64 },
    /// A perturbation path must vanish at time zero.
    UnanchoredPerturbation,
    /// A fixed-point iteration stopped before reaching its tolerance.
    NoConvergence { iterations: usize, gap: f64 },
    /// A Cholesky pivot fell below the positivity threshold.
    CovarianceNotPD { index: usize, pivot: f64 },
    /// Convergence ladders need grid sizes that each divide the next.
    NonNestedLadder,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSet(msg) => write!(f, "invalid convex set: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidGrid(msg) => write!(f, "invalid time grid: {msg}"),
            Error::GridMismatch => write!(f, "paths are sampled on different grids"),
            Error::ReferenceMismatch => {
                write!(f, "controlled path does not reference the supplied lift")
            }
            Error::InvalidExponent(p) => write!(f, "variation exponent must be >= 1, got {p}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::PolytopeNonConvergence { sweeps, last_change } => write!(
                f,
                "polytope projection did not converge after {sweeps} sweeps (last change {last_change:e})"
            ),
            Error::InfeasibleStart { distance } => {
                write!(f, "initial point lies outside C(0) (distance {distance:e})")
            }
            Error::UnanchoredPerturbation => write!(f, "perturbation path must vanish at t = 0"),
            Error::NoConvergence { iterations, gap } => write!(
                f,
                "fixed-point iteration did not converge after {iterations} iterations (gap {gap:e})"
            ),
            Error::CovarianceNotPD { index, pivot } => write!(
                f,
                "covariance matrix is not positive definite (pivot {index} = {pivot:e})"
            ),
            Error::NonNestedLadder => {
                write!(f, "grid sizes must be ascending and each must divide the next")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
