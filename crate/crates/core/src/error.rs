use thiserror::Error;

/// Where along a contour a numerical failure happened.
#[derive(Debug, Clone, PartialEq)]
pub struct PathLocation {
    pub segment: &'static str,
    pub parameter: f64,
    pub re: f64,
    pub im: f64,
}

impl std::fmt::Display for PathLocation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} segment, parameter {:.6e}, r = {:.6e}{:+.6e}i",
            self.segment, self.parameter, self.re, self.im
        )
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("phase {theta} lies on the sector boundary (anti-Stokes line) θ = {k}π")]
    SectorBoundary { theta: f64, k: i64 },

    #[error("the branch point r = 0 cannot be evaluated")]
    BranchPoint,

    #[error("series for order {order} did not converge in {terms} terms (tail bound {bound:.3e})")]
    SeriesNotConverged { order: f64, terms: usize, bound: f64 },

    #[error("|z| = {modulus} too small for a {target:.0e}-accurate asymptotic expansion (best term {best:.3e})")]
    InsufficientModulus { modulus: f64, target: f64, best: f64 },

    #[error("continued fraction for order {order} at |z| = {modulus} did not converge")]
    ContinuedFractionNotConverged { order: f64, modulus: f64 },

    #[error("series and asymptotic regimes disagree by {rel:.3e} at |z| = {modulus}")]
    RegimeDisagreement { modulus: f64, rel: f64 },

    #[error("continuation oracle failed: {0}")]
    OracleFailure(String),

    #[error("malformed contour: {0}")]
    MalformedPath(String),

    #[error("step size underflow at {0}")]
    StepUnderflow(PathLocation),

    #[error("maximum number of steps ({max_steps}) exceeded at {location}")]
    MaxStepsExceeded { max_steps: usize, location: PathLocation },

    #[error("fit system nearly singular: |det| = {det:.3e}, expected {expected:.3e}")]
    NearSingularFit { det: f64, expected: f64 },

    #[error("value overflow: log-magnitude {0:.3e} is not representable")]
    Overflow(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
