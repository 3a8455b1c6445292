//! Inverse problem per candidate class: given a target location expressed in
//! the start frame, find every segment-angle pair that reaches it.
//!
//! Each two-segment class reduces exactly to one scalar equation in the
//! second angle:
//!
//! - `LG`/`RG`: the combination `x + r*z/sqrt(1-r^2)` of the endpoint
//!   components isolates `cos(phi2)`; the remaining rows are linear in
//!   `(cos(phi1), sin(phi1))`.
//! - `LR`/`RL`: projecting the endpoint equation onto the first turn's axis
//!   eliminates `phi1` and is again linear in `cos(phi2)`; `phi1` follows by
//!   aligning the second turn's start point with the target around that axis.
//!
//! Every inverse-trig step yields two candidate angles; all pairs are
//! residual-checked against the forward model rather than pruned
//! analytically. A bracketed-scan fallback over the second angle provides an
//! independent route when the closed-form branch logic is inconclusive.

use nalgebra::Vector3;
use std::f64::consts::{PI, TAU};

use crate::geometry::{rotation_for, SegmentType, TurnRadius};
use crate::tolerances::TOL;
use crate::{Error, Result};

/// Candidate path classes, in the fixed tie-break order used by the planner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathType {
    Lg,
    Rg,
    Lr,
    Rl,
    L,
    R,
    G,
    Trivial,
}

impl PathType {
    /// Canonical label, e.g. `"LG"`.
    pub fn label(self) -> &'static str {
        match self {
            PathType::Lg => "LG",
            PathType::Rg => "RG",
            PathType::Lr => "LR",
            PathType::Rl => "RL",
            PathType::L => "L",
            PathType::R => "R",
            PathType::G => "G",
            PathType::Trivial => "TRIVIAL",
        }
    }

    /// Segment types of the (up to two) path pieces.
    pub fn segment_types(self) -> (Option<SegmentType>, Option<SegmentType>) {
        match self {
            PathType::Lg => (Some(SegmentType::L), Some(SegmentType::G)),
            PathType::Rg => (Some(SegmentType::R), Some(SegmentType::G)),
            PathType::Lr => (Some(SegmentType::L), Some(SegmentType::R)),
            PathType::Rl => (Some(SegmentType::R), Some(SegmentType::L)),
            PathType::L => (Some(SegmentType::L), None),
            PathType::R => (Some(SegmentType::R), None),
            PathType::G => (Some(SegmentType::G), None),
            PathType::Trivial => (None, None),
        }
    }
}

impl std::fmt::Display for PathType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Target location expressed in the start frame (the instance is reduced so
/// the start pose is the identity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetLocal(Vector3<f64>);

impl TargetLocal {
    /// Validates unit norm.
    pub fn new(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if (norm - 1.0).abs() <= TOL.unit_vector {
            Ok(TargetLocal(v))
        } else {
            Err(Error::NotUnit {
                norm,
                tol: TOL.unit_vector,
            })
        }
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }
}

/// One solution of a class equation: the angle pair and the endpoint
/// mismatch of the forward-composed path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionBranch {
    pub path_type: PathType,
    pub phi1: f64,
    /// Zero for single-segment classes. At least pi for `LR`/`RL`.
    pub phi2: f64,
    pub residual: f64,
}

/// Mirror across the equatorial plane (negate z). Conjugating by this map
/// swaps left and right turns.
pub(crate) fn mirror(v: &Vector3<f64>) -> Vector3<f64> {
    Vector3::new(v.x, v.y, -v.z)
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    let mut w = a % TAU;
    if w < 0.0 {
        w += TAU;
    }
    if w >= TAU {
        w = 0.0;
    }
    w
}

/// Wraps into [0, 2*pi) and snaps near-zero / near-full-circle angles to 0.
pub(crate) fn snap_angle(a: f64) -> f64 {
    let w = wrap_angle(a);
    if w < TOL.angle_snap || TAU - w < TOL.angle_snap {
        0.0
    } else {
        w
    }
}

/// Endpoint of a forward-composed path of the given class.
pub(crate) fn class_endpoint(
    path_type: PathType,
    r: TurnRadius,
    phi1: f64,
    phi2: f64,
) -> Vector3<f64> {
    let (first, second) = path_type.segment_types();
    let mut m = nalgebra::Matrix3::identity();
    if let Some(ty) = first {
        m *= rotation_for(ty, r, phi1);
    }
    if let Some(ty) = second {
        m *= rotation_for(ty, r, phi2);
    }
    m.column(0).into_owned()
}

/// Rotation angle about unit axis `k` taking `from` onto `to`, assuming both
/// lie on the same circle around `k`. `None` when `from` is (numerically) on
/// the axis, in which case every angle works.
fn rotation_angle_about_axis(
    k: &Vector3<f64>,
    from: &Vector3<f64>,
    to: &Vector3<f64>,
) -> Option<f64> {
    let tangential = k.cross(from);
    let rho2 = tangential.norm_squared();
    if rho2 < 1e-18 {
        return None;
    }
    let radial = from - k * k.dot(from);
    Some((to.dot(&tangential) / rho2).atan2(to.dot(&radial) / rho2))
}

const POLISH_WINDOW: f64 = 1e-4;
const POLISH_ITERS: usize = 60;

/// Golden-section refinement of `phi2` around an arccos-derived guess.
///
/// arccos loses ~sqrt(eps) of precision near its branch points, which is not
/// enough for the 1e-9 endpoint gate; minimizing the true endpoint residual
/// restores full precision. `phi1_of` re-derives the first angle exactly for
/// each trial `phi2`.
fn polish_branch(
    guess: f64,
    phi1_of: impl Fn(f64) -> Option<f64>,
    endpoint: impl Fn(f64, f64) -> Vector3<f64>,
    target: &Vector3<f64>,
) -> Option<(f64, f64, f64)> {
    let residual_at = |phi2: f64| -> f64 {
        match phi1_of(phi2) {
            Some(phi1) => (endpoint(phi1, phi2) - target).norm(),
            None => f64::INFINITY,
        }
    };
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = guess - POLISH_WINDOW;
    let mut b = guess + POLISH_WINDOW;
    let mut best = (guess, residual_at(guess));
    let mut x1 = b - (b - a) * INV_PHI;
    let mut x2 = a + (b - a) * INV_PHI;
    let mut f1 = residual_at(x1);
    let mut f2 = residual_at(x2);
    for _ in 0..POLISH_ITERS {
        if f1 < best.1 {
            best = (x1, f1);
        }
        if f2 < best.1 {
            best = (x2, f2);
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - (b - a) * INV_PHI;
            f1 = residual_at(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + (b - a) * INV_PHI;
            f2 = residual_at(x2);
        }
    }
    let (phi2, residual) = best;
    let phi1 = phi1_of(phi2)?;
    Some((phi1, phi2, residual))
}

/// Builds a branch at snapped angles, keeping the raw angles when snapping
/// would push the endpoint outside the feasibility gate.
fn finish_branch(
    path_type: PathType,
    r: TurnRadius,
    phi1: f64,
    phi2: f64,
    target: &Vector3<f64>,
) -> Option<SolutionBranch> {
    let candidates = [
        (snap_angle(phi1), snap_angle(phi2)),
        (wrap_angle(phi1), wrap_angle(phi2)),
    ];
    for (p1, p2) in candidates {
        let residual = (class_endpoint(path_type, r, p1, p2) - target).norm();
        if residual <= TOL.endpoint {
            return Some(SolutionBranch {
                path_type,
                phi1: p1,
                phi2: p2,
                residual,
            });
        }
    }
    None
}

fn sort_and_dedupe(mut branches: Vec<SolutionBranch>) -> Vec<SolutionBranch> {
    branches.sort_by(|a, b| {
        (a.path_type, a.phi1, a.phi2)
            .partial_cmp(&(b.path_type, b.phi1, b.phi2))
            .expect("angles are finite")
    });
    branches.dedup_by(|a, b| {
        a.path_type == b.path_type && (a.phi1 - b.phi1).abs() <= 1e-9 && (a.phi2 - b.phi2).abs() <= 1e-9
    });
    branches
}

/// All `LG` paths reaching `x_f`: a left tight turn followed by a
/// great-circle arc. Empty when no such path exists.
pub fn solve_lg(x_f: &TargetLocal, r: TurnRadius) -> Vec<SolutionBranch> {
    cg_family(x_f, r, PathType::Lg)
}

/// All `RG` paths reaching `x_f` (mirror of [`solve_lg`], residual-checked
/// against the right-turn composition directly).
pub fn solve_rg(x_f: &TargetLocal, r: TurnRadius) -> Vec<SolutionBranch> {
    cg_family(x_f, r, PathType::Rg)
}

fn cg_family(x_f: &TargetLocal, r: TurnRadius, path_type: PathType) -> Vec<SolutionBranch> {
    let t = if path_type == PathType::Lg {
        *x_f.vector()
    } else {
        mirror(x_f.vector())
    };
    let rr = r.get();
    let lat = (1.0 - rr * rr).sqrt();

    // x + r*z/sqrt(1-r^2) equals cos(phi2) for every point reachable by this
    // class; out-of-range values mean the class cannot reach the target.
    let cos_phi2 = t.x + rr * t.z / lat;
    let mut out = Vec::new();
    if cos_phi2.abs() <= 1.0 + TOL.branch_slack {
        let base = cos_phi2.clamp(-1.0, 1.0).acos();
        let phi1_of = |phi2: f64| cg_first_angle(&t, rr, lat, phi2);
        // Residuals are evaluated in the original chirality, not the
        // mirrored frame.
        let endpoint = |p1: f64, p2: f64| class_endpoint(path_type, r, p1, p2);
        let target = x_f.vector();
        for guess in [base, TAU - base] {
            if let Some((p1, p2, _)) = polish_branch(guess, phi1_of, endpoint, target) {
                if let Some(branch) = finish_branch(path_type, r, p1, p2, target) {
                    out.push(branch);
                }
            }
        }
    }
    if out.is_empty() && cos_phi2.abs() <= 1.0 - 1e-6 {
        // The branch equation says the class is solvable but the closed form
        // came up empty; fall back to the scan route.
        out = scan_family(x_f, r, path_type, 0.0, TAU);
    }
    sort_and_dedupe(out)
}

fn cg_first_angle(t: &Vector3<f64>, rr: f64, lat: f64, phi2: f64) -> Option<f64> {
    let (s2, c2) = phi2.sin_cos();
    let det = s2 * s2 + rr * rr * c2 * c2;
    if det < 1e-30 {
        return None;
    }
    let zp = t.z / lat;
    let cos1 = (s2 * t.y - rr * c2 * (zp - rr * c2)) / det;
    let sin1 = (rr * c2 * t.y + s2 * (zp - rr * c2)) / det;
    Some(sin1.atan2(cos1))
}

/// All `LR` paths reaching `x_f` whose second angle is at least pi (the
/// optimality filter for turn-turn paths).
pub fn solve_lr(x_f: &TargetLocal, r: TurnRadius) -> Vec<SolutionBranch> {
    cc_family(x_f, r, PathType::Lr)
}

/// All `RL` paths reaching `x_f` with second angle at least pi (mirror of
/// [`solve_lr`]).
pub fn solve_rl(x_f: &TargetLocal, r: TurnRadius) -> Vec<SolutionBranch> {
    cc_family(x_f, r, PathType::Rl)
}

fn cc_family(x_f: &TargetLocal, r: TurnRadius, path_type: PathType) -> Vec<SolutionBranch> {
    let t = if path_type == PathType::Lr {
        *x_f.vector()
    } else {
        mirror(x_f.vector())
    };
    let rr = r.get();
    let lat = (1.0 - rr * rr).sqrt();
    let axis = SegmentType::L.unit_axis(r);

    // Projection onto the first turn's axis is invariant under the first
    // rotation, leaving a linear equation in cos(phi2).
    let cos_phi2 = 1.0 - (1.0 - t.dot(&axis) / lat) / (2.0 * rr * rr);
    let mut out = Vec::new();
    if cos_phi2.abs() <= 1.0 + TOL.branch_slack {
        let base = cos_phi2.clamp(-1.0, 1.0).acos();
        let second = second_in_reduction(path_type);
        let phi1_of = |phi2: f64| {
            let w = rotation_for(second, r, phi2).column(0).into_owned();
            rotation_angle_about_axis(&axis, &w, &t)
        };
        let endpoint = |p1: f64, p2: f64| class_endpoint(path_type, r, p1, p2);
        let target = x_f.vector();
        for guess in [base, TAU - base] {
            let Some((p1, mut p2, _)) = polish_branch(guess, phi1_of, endpoint, target) else {
                continue;
            };
            let mut p1 = p1;
            // The boundary family of this class sits exactly at phi2 = pi;
            // snap when the snapped pair still solves the equation so the
            // >= pi filter is stable there. The window matches the snap
            // tolerance: the residual is quadratically flat around the
            // boundary's double root, so the polish can wander that far.
            if (wrap_angle(p2) - PI).abs() <= TOL.angle_snap {
                if let Some(q1) = phi1_of(PI) {
                    let res = (endpoint(q1, PI) - target).norm();
                    if res <= TOL.endpoint {
                        p1 = q1;
                        p2 = PI;
                    }
                }
            }
            if let Some(branch) = finish_branch(path_type, r, p1, p2, target) {
                if branch.phi2 >= PI {
                    out.push(branch);
                }
            }
        }
    }
    if out.is_empty() && cos_phi2.abs() <= 1.0 - 1e-6 {
        let scanned = scan_family(x_f, r, path_type, PI, TAU);
        out = scanned;
    }
    sort_and_dedupe(out)
}

/// Second segment type once the instance is reduced to a left-first frame
/// (the `RL` class mirrors onto `LR`, so turn-turn reductions always see an
/// `R` second segment).
fn second_in_reduction(path_type: PathType) -> SegmentType {
    match path_type {
        PathType::Lg | PathType::Rg => SegmentType::G,
        _ => SegmentType::R,
    }
}

/// Degenerate candidates: a single great-circle arc, a single tight turn, or
/// the trivial path when the target coincides with the start location.
pub fn solve_single(x_f: &TargetLocal, r: TurnRadius) -> Vec<SolutionBranch> {
    let t = x_f.vector();
    let e1 = Vector3::x();
    if (t - e1).norm() <= TOL.endpoint {
        return vec![SolutionBranch {
            path_type: PathType::Trivial,
            phi1: 0.0,
            phi2: 0.0,
            residual: (t - e1).norm(),
        }];
    }
    let mut out = Vec::new();

    // Great-circle arc: feasible iff the target lies on the equator of the
    // start frame.
    let phi = snap_angle(t.y.atan2(t.x));
    if phi > 0.0 {
        if let Some(branch) = finish_branch(PathType::G, r, phi, 0.0, t) {
            out.push(branch);
        }
    }

    // Single tight turns: the target must lie on the respective turn circle.
    for (seg, ty) in [(SegmentType::L, PathType::L), (SegmentType::R, PathType::R)] {
        let axis = seg.unit_axis(r);
        if let Some(raw) = rotation_angle_about_axis(&axis, &e1, t) {
            let phi = snap_angle(raw);
            if phi > 0.0 {
                if let Some(branch) = finish_branch(ty, r, phi, 0.0, t) {
                    out.push(branch);
                }
            }
        }
    }
    sort_and_dedupe(out)
}

const SCAN_STEP: f64 = 1e-3;
const SCAN_REFINE_WIDTH: f64 = 1e-12;

/// Bracketed-scan route for the `LG` class (fallback and cross-check for the
/// closed form): scans the second angle over [0, 2*pi).
pub fn solve_lg_scan(x_f: &TargetLocal, r: TurnRadius) -> Vec<SolutionBranch> {
    sort_and_dedupe(scan_family(x_f, r, PathType::Lg, 0.0, TAU))
}

/// Scan route for `RG`; see [`solve_lg_scan`].
pub fn solve_rg_scan(x_f: &TargetLocal, r: TurnRadius) -> Vec<SolutionBranch> {
    sort_and_dedupe(scan_family(x_f, r, PathType::Rg, 0.0, TAU))
}

/// Scan route for `LR`: scans the second angle over [pi, 2*pi) only, since
/// shorter second turns are never optimal for turn-turn paths.
pub fn solve_lr_scan(x_f: &TargetLocal, r: TurnRadius) -> Vec<SolutionBranch> {
    sort_and_dedupe(scan_family(x_f, r, PathType::Lr, PI, TAU))
}

/// Scan route for `RL`; see [`solve_lr_scan`].
pub fn solve_rl_scan(x_f: &TargetLocal, r: TurnRadius) -> Vec<SolutionBranch> {
    sort_and_dedupe(scan_family(x_f, r, PathType::Rl, PI, TAU))
}

/// 1-D bracketing scan over the second angle. The scanned function is the
/// component of the endpoint equation along the first segment's rotation
/// axis, which does not depend on the first angle.
fn scan_family(
    x_f: &TargetLocal,
    r: TurnRadius,
    path_type: PathType,
    lo: f64,
    hi: f64,
) -> Vec<SolutionBranch> {
    let left_first = matches!(path_type, PathType::Lg | PathType::Lr);
    let t = if left_first {
        *x_f.vector()
    } else {
        mirror(x_f.vector())
    };
    let axis = SegmentType::L.unit_axis(r);
    let second = second_in_reduction(path_type);

    let gap = |phi2: f64| -> f64 {
        let w = rotation_for(second, r, phi2).column(0).into_owned();
        (t - w).dot(&axis)
    };

    let mut roots = Vec::new();
    let steps = ((hi - lo) / SCAN_STEP).ceil() as usize;
    let mut prev_x = lo;
    let mut prev_g = gap(lo);
    for i in 1..=steps {
        let x = lo + (hi - lo) * i as f64 / steps as f64;
        let g = gap(x);
        if prev_g == 0.0 {
            roots.push(prev_x);
        } else if prev_g * g < 0.0 {
            // Bisect the bracket down to the refinement width.
            let (mut a, mut b) = (prev_x, x);
            let mut ga = prev_g;
            while b - a > SCAN_REFINE_WIDTH {
                let mid = 0.5 * (a + b);
                let gm = gap(mid);
                if ga * gm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    ga = gm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_x = x;
        prev_g = g;
    }
    if prev_g == 0.0 {
        roots.push(prev_x);
    }

    let mut out = Vec::new();
    let turn_turn = matches!(path_type, PathType::Lr | PathType::Rl);
    for mut phi2 in roots {
        // Stabilize the boundary family exactly as the closed form does.
        if turn_turn && (wrap_angle(phi2) - PI).abs() <= TOL.angle_snap {
            phi2 = PI;
        }
        let w = rotation_for(second, r, phi2).column(0).into_owned();
        let Some(phi1) = rotation_angle_about_axis(&axis, &w, &t) else {
            continue;
        };
        let Some(branch) = finish_branch(path_type, r, phi1, phi2, x_f.vector()) else {
            continue;
        };
        if !turn_turn || branch.phi2 >= PI {
            out.push(branch);
        }
    }
    out
}
