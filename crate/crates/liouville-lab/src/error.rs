//! Crate-wide error type. Every failure mode named by an operation contract
//! maps to one variant here; the CLI maps variants to exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Weight exponent outside (−1, 0]: the measure |x−c|^{2α}dx is either
    /// non-integrable at the center or outside the supported cone range.
    #[error("invalid weight exponent alpha = {alpha}: need -1 < alpha <= 0")]
    InvalidWeight { alpha: f64 },

    /// A path vertex coincides with the weight center while α < 0; the line
    /// integrand |x−c|^{α} is refused there rather than regularized.
    #[error("path vertex lies on the weight center: boundary measure is singular for alpha < 0")]
    SingularBoundary,

    /// Query point outside the sampled (masked) domain.
    #[error("point ({x}, {y}) is outside the sampled domain")]
    OutOfDomain { x: f64, y: f64 },

    /// Evaluation radius beyond the range an object is defined on.
    #[error("radius {r} is outside the valid range (max {max})")]
    OutOfRange { r: f64, max: f64 },

    /// e^u overflowed during radial integration; names the radius reached.
    #[error("solution overflowed at radius {radius:.6e}: peak value too large for this range")]
    BlowupOverflow { radius: f64 },

    /// Damped Newton ran out of iterations.
    #[error("Newton did not converge in {iterations} iterations: residual sup-norm {residual:.3e}")]
    NonConvergence { iterations: usize, residual: f64 },

    /// Sampled distribution function ξ increased between adjacent levels by
    /// more than the consistency tolerance: a quadrature bug upstream.
    #[error("distribution function is not monotone: xi jumps by {jump:.3e} between adjacent levels")]
    InconsistentDistribution { jump: f64 },

    /// Too little asymptotic range for a log-log decay fit.
    #[error("tail spans only {decades:.2} decades, need at least {needed:.2} for a fit")]
    InsufficientTail { decades: f64, needed: f64 },

    /// Subcase classification requested for a configuration where the peak
    /// sits at (or at bounded distance from) the singularity.
    #[error("subcase classification is undefined in case I (peak within the threshold distance of the singularity)")]
    InvalidCase,

    /// Boundary polyline is not simple.
    #[error("boundary is not a simple closed curve (self-intersection near ({x:.6}, {y:.6}))")]
    InvalidDomain { x: f64, y: f64 },

    /// Adaptive quadrature hit its depth cap before the tolerance.
    #[error("quadrature did not reach the requested tolerance: achieved error estimate {achieved:.3e}")]
    QuadratureNoConvergence { achieved: f64 },

    /// Malformed field file or config file.
    #[error("parse error in {what}: {detail}")]
    Parse { what: String, detail: String },

    /// CLI usage problem: unknown key, missing command, bad scalar.
    #[error("usage error: {0}")]
    Usage(String),

    /// A numerical pipeline failed in a way that is not a usage error.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
