//! Candidate enumeration and minimum-length selection.
//!
//! For `r <= 1/2` the shortest path to a location with free terminal heading
//! is `LG`, `RG`, `LR`, `RL`, or a degenerate of those, so planning reduces
//! to running the class solvers, assembling the feasible candidates, and
//! picking the shortest.

use nalgebra::Vector3;

use crate::geometry::{path_endpoint, Configuration, Segment, TurnRadius};
use crate::solvers::{
    self, PathType, SolutionBranch, TargetLocal,
};
use crate::tolerances::TOL;
use crate::{Error, Result};

/// Largest turn radius the planner accepts; the candidate set is proven for
/// `r <= 1/2` only.
pub const PLANNER_MAX_RADIUS: f64 = 0.5;

/// One feasible path: its class, angles, realized segments, and length.
#[derive(Debug, Clone, PartialEq)]
pub struct PathCandidate {
    pub path_type: PathType,
    /// Angle of the first segment (of the possibly reclassified type).
    pub phi1: f64,
    /// Angle of the second segment; 0 for single-segment candidates.
    pub phi2: f64,
    /// Realized segments; zero-angle segments are dropped.
    pub segments: Vec<Segment>,
    pub r: TurnRadius,
    /// Total arc length, `sum(r * phi)` over turns plus `sum(phi)` over arcs.
    pub length: f64,
    /// Endpoint mismatch against the target.
    pub residual: f64,
}

/// All feasible candidates for an instance plus the selected optimum.
#[derive(Debug, Clone)]
pub struct Plan {
    /// The instance: start pose, target location, turn radius.
    pub r0: Configuration,
    pub target: Vector3<f64>,
    pub r: TurnRadius,
    /// Deterministically ordered (class order, then length).
    pub candidates: Vec<PathCandidate>,
    /// Index of the minimum-length candidate; ties break by class order.
    pub optimal: usize,
}

impl Plan {
    /// The selected minimum-length candidate.
    pub fn optimal(&self) -> &PathCandidate {
        &self.candidates[self.optimal]
    }
}

fn gate_radius(r: TurnRadius) -> Result<()> {
    if r.get() > PLANNER_MAX_RADIUS {
        Err(Error::RadiusAboveHalf(r.get()))
    } else {
        Ok(())
    }
}

/// Reclassifies a branch whose snapped angles degenerate it into a shorter
/// class, so the same geometry never appears under two labels.
fn effective_class(branch: &SolutionBranch) -> (PathType, f64, f64) {
    let SolutionBranch {
        path_type,
        phi1,
        phi2,
        ..
    } = *branch;
    let first_zero = phi1 == 0.0;
    let second_zero = phi2 == 0.0;
    match path_type {
        PathType::Lg | PathType::Rg | PathType::Lr | PathType::Rl => {
            let (first, second) = path_type.segment_types();
            match (first_zero, second_zero) {
                (false, false) => (path_type, phi1, phi2),
                (true, false) => (single_class(second.unwrap()), phi2, 0.0),
                (false, true) => (single_class(first.unwrap()), phi1, 0.0),
                (true, true) => (PathType::Trivial, 0.0, 0.0),
            }
        }
        _ => (path_type, phi1, phi2),
    }
}

fn single_class(seg: crate::geometry::SegmentType) -> PathType {
    match seg {
        crate::geometry::SegmentType::L => PathType::L,
        crate::geometry::SegmentType::R => PathType::R,
        crate::geometry::SegmentType::G => PathType::G,
    }
}

fn candidate_from_branch(
    branch: &SolutionBranch,
    r: TurnRadius,
    target: &Vector3<f64>,
) -> PathCandidate {
    let (path_type, phi1, phi2) = effective_class(branch);
    let (first, second) = path_type.segment_types();
    let mut segments = Vec::with_capacity(2);
    if let Some(ty) = first {
        if phi1 > 0.0 {
            segments.push(Segment::new(ty, phi1).expect("solver angles are in range"));
        }
    }
    if let Some(ty) = second {
        if phi2 > 0.0 {
            segments.push(Segment::new(ty, phi2).expect("solver angles are in range"));
        }
    }
    // An empty sum is IEEE -0.0; keep reported lengths at +0.0.
    let length: f64 = segments.iter().map(|s| s.arc_length(r)).sum::<f64>().max(0.0);
    let residual = (path_endpoint(&Configuration::identity(), &segments, r) - target).norm();
    PathCandidate {
        path_type,
        phi1,
        phi2,
        segments,
        r,
        length,
        residual,
    }
}

/// Runs every class solver against a local-frame target and assembles the
/// feasible candidates, deterministically ordered.
pub fn enumerate_candidates(x_f: &TargetLocal, r: TurnRadius) -> Result<Vec<PathCandidate>> {
    gate_radius(r)?;
    let target = *x_f.vector();

    // Near-trivial targets route through the degenerate solver alone; the
    // two-segment reductions are ill-conditioned when every angle is tiny.
    let singles = solvers::solve_single(x_f, r);
    if singles
        .iter()
        .any(|b| b.path_type == PathType::Trivial)
    {
        return Ok(vec![candidate_from_branch(&singles[0], r, &target)]);
    }

    let mut branches = singles;
    branches.extend(solvers::solve_lg(x_f, r));
    branches.extend(solvers::solve_rg(x_f, r));
    branches.extend(solvers::solve_lr(x_f, r));
    branches.extend(solvers::solve_rl(x_f, r));

    let mut candidates: Vec<PathCandidate> = branches
        .iter()
        .map(|b| candidate_from_branch(b, r, &target))
        .filter(|c| c.residual <= TOL.endpoint)
        .collect();

    candidates.sort_by(|a, b| {
        (a.path_type, a.length, a.phi1, a.phi2)
            .partial_cmp(&(b.path_type, b.length, b.phi1, b.phi2))
            .expect("candidate fields are finite")
    });
    candidates.dedup_by(|a, b| {
        a.path_type == b.path_type
            && (a.phi1 - b.phi1).abs() <= 1e-9
            && (a.phi2 - b.phi2).abs() <= 1e-9
    });
    Ok(candidates)
}

/// Plans the shortest constrained path from `r0` to the location `x_f`
/// (terminal heading free).
///
/// Always yields at least one candidate for valid input: for `r <= 1/2` at
/// most one of `x + r z / sqrt(1-r^2)` and `x - r z / sqrt(1-r^2)` can leave
/// [-1, 1], so the `LG`/`RG` pair alone covers the sphere. An empty
/// enumeration therefore reports [`Error::EmptyCandidateSet`] as a solver
/// defect instead of returning an empty plan.
pub fn plan(r0: &Configuration, x_f: &Vector3<f64>, r: TurnRadius) -> Result<Plan> {
    gate_radius(r)?;
    let norm = x_f.norm();
    if (norm - 1.0).abs() > TOL.unit_vector {
        return Err(Error::NotUnit {
            norm,
            tol: TOL.unit_vector,
        });
    }
    let local_vec = (r0.matrix().transpose() * x_f).normalize();
    let local = TargetLocal::new(local_vec)?;

    let mut candidates = enumerate_candidates(&local, r)?;
    if candidates.is_empty() {
        return Err(Error::EmptyCandidateSet);
    }
    // Residuals are reported against the caller's frame and target.
    for cand in &mut candidates {
        cand.residual = (path_endpoint(r0, &cand.segments, r) - x_f).norm();
    }

    let min_length = candidates
        .iter()
        .map(|c| c.length)
        .fold(f64::INFINITY, f64::min);
    // Candidates are sorted by class order first, so the first one inside
    // the tie window is the deterministic winner.
    let optimal = candidates
        .iter()
        .position(|c| c.length <= min_length + TOL.tie_break)
        .expect("at least one candidate attains the minimum");

    Ok(Plan {
        r0: *r0,
        target: *x_f,
        r,
        candidates,
        optimal,
    })
}
