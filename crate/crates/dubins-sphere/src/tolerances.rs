//! Centralized numeric tolerances shared by the library, the test suites,
//! and the CLI. No other module defines its own feasibility thresholds.

/// The tolerance record. One instance, [`TOL`], is used everywhere.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Endpoint residual below which a solver branch counts as feasible.
    pub endpoint: f64,
    /// SO(3) membership bound for strict matrix checks.
    pub matrix: f64,
    /// Orthonormality/determinant bound when validating caller-supplied
    /// configurations (looser than `matrix`: inputs may have been composed
    /// or deserialized).
    pub rotation_check: f64,
    /// Unit-norm bound for target locations.
    pub unit_vector: f64,
    /// Angles closer than this to 0 (or 2*pi) snap to exactly 0 so that
    /// solvers never emit micro-segments or full circles.
    pub angle_snap: f64,
    /// Candidates whose lengths differ by less than this tie; ties break by
    /// the fixed path-type order.
    pub tie_break: f64,
    /// Accepted overshoot of |cos| beyond 1 before a branch equation is
    /// declared unsolvable (rounding slack, clamped away afterwards).
    pub branch_slack: f64,
}

/// Default tolerances.
pub const TOL: Tolerances = Tolerances {
    endpoint: 1e-9,
    matrix: 1e-12,
    rotation_check: 1e-9,
    unit_vector: 1e-9,
    angle_snap: 1e-7,
    tie_break: 1e-10,
    branch_slack: 1e-9,
};
