use thiserror::Error;

/// Errors returned by the planning and analysis operations.
///
/// Domain errors name the violated constraint so callers (and the CLI)
/// can surface an actionable message.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Turn radius outside the admissible interval (0, 1/sqrt(2)].
    #[error("turn radius must lie in (0, 1/sqrt(2)]: got {0}")]
    InvalidRadius(f64),

    /// The planner's candidate set is only proven for r <= 1/2.
    #[error("r must be <= 0.5 for planning (candidate set is proven for r <= 1/2): got {0}")]
    RadiusAboveHalf(f64),

    /// Segment angles are normalized to [0, 2*pi).
    #[error("segment angle must lie in [0, 2*pi): got {0}")]
    AngleOutOfRange(f64),

    /// A vector that must be a point on the unit sphere is not unit length.
    #[error("vector must have unit norm (within {tol:e}): |v| = {norm}")]
    NotUnit { norm: f64, tol: f64 },

    /// A matrix that must be a proper rotation failed validation.
    #[error("matrix is not a proper rotation: {0}")]
    NotRotation(String),

    /// Integrator or grid parameters out of range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Waypoint sampling needs at least the two endpoints.
    #[error("sample count must be >= 2: got {0}")]
    SampleCount(usize),

    /// Analysis operations are restricted to the radius range they are valid on.
    #[error("r outside the valid range {range} for {operation}: got {value}")]
    AnalysisDomain {
        operation: &'static str,
        range: &'static str,
        value: f64,
    },

    /// The planner found no feasible candidate for a valid instance.
    ///
    /// This should never happen for unit targets and r <= 1/2; it signals a
    /// solver defect rather than an unreachable instance.
    #[error("no feasible candidate found for a valid instance (solver defect)")]
    EmptyCandidateSet,
}
