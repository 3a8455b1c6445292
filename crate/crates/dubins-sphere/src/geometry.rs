//! Forward model for motion on the unit sphere: segment rotation matrices,
//! frame ODE integration, path composition, and waypoint sampling.
//!
//! A vehicle pose is a proper rotation `R = [X, T, N]` whose columns are the
//! position, tangent, and tangent-normal unit vectors. Moving along a segment
//! multiplies the pose on the right by a fixed rotation that depends only on
//! the segment type, the turn radius, and the swept angle.

use nalgebra::{Matrix3, Vector3};
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use crate::tolerances::TOL;
use crate::{Error, Result};

/// Motion primitive selector: left tight turn, right tight turn, or
/// great-circle arc.
///
/// The declaration order doubles as the deterministic tie-break order used
/// by the oracle when comparing control words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SegmentType {
    /// Left tight turn (geodesic curvature +u_max).
    L,
    /// Right tight turn (geodesic curvature -u_max).
    R,
    /// Great-circle arc (geodesic curvature 0).
    G,
}

impl SegmentType {
    /// All three segment types, in tie-break order.
    pub const ALL: [SegmentType; 3] = [SegmentType::L, SegmentType::R, SegmentType::G];

    /// Radius of the circle this segment traces on the sphere.
    pub fn radius(self, r: TurnRadius) -> f64 {
        match self {
            SegmentType::L | SegmentType::R => r.get(),
            SegmentType::G => 1.0,
        }
    }

    /// Geodesic curvature applied while on this segment.
    pub fn geodesic_curvature(self, r: TurnRadius) -> f64 {
        match self {
            SegmentType::L => r.u_max(),
            SegmentType::R => -r.u_max(),
            SegmentType::G => 0.0,
        }
    }

    /// Unit rotation axis of the segment's screw motion, expressed in the
    /// frame at the segment start. Sweeping an angle `phi` about this axis
    /// reproduces [`segment_rotation`].
    pub fn unit_axis(self, r: TurnRadius) -> Vector3<f64> {
        let rr = r.get();
        let lat = (1.0 - rr * rr).sqrt();
        match self {
            SegmentType::L => Vector3::new(lat, 0.0, rr),
            SegmentType::R => Vector3::new(-lat, 0.0, rr),
            SegmentType::G => Vector3::new(0.0, 0.0, 1.0),
        }
    }
}

impl std::fmt::Display for SegmentType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SegmentType::L => "L",
            SegmentType::R => "R",
            SegmentType::G => "G",
        })
    }
}

/// Tight-turn radius `r` in (0, 1/sqrt(2)]. The geodesic-curvature bound
/// `u_max = sqrt(1/r^2 - 1)` is derived, never stored.
///
/// Planning operations additionally require `r <= 1/2`; that gate lives in
/// [`crate::planner`] so the analysis utilities can use the full range.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TurnRadius(f64);

impl TurnRadius {
    /// Largest admissible radius, `1/sqrt(2)`.
    pub const MAX: f64 = FRAC_1_SQRT_2;

    /// Validates `r` in (0, 1/sqrt(2)].
    pub fn new(r: f64) -> Result<Self> {
        if r.is_finite() && r > 0.0 && r <= Self::MAX {
            Ok(TurnRadius(r))
        } else {
            Err(Error::InvalidRadius(r))
        }
    }

    /// The radius value.
    pub fn get(self) -> f64 {
        self.0
    }

    /// Geodesic-curvature bound `sqrt(1/r^2 - 1)`; satisfies
    /// `r * sqrt(1 + u_max^2) = 1` to machine precision.
    pub fn u_max(self) -> f64 {
        (1.0 / (self.0 * self.0) - 1.0).sqrt()
    }
}

/// Atomic path piece: a segment type plus its swept angle in [0, 2*pi).
///
/// The arc length is `r * angle` for tight turns and `angle` for great-circle
/// arcs; it is derived on demand, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub seg_type: SegmentType,
    pub angle: f64,
}

impl Segment {
    /// Validates the angle range [0, 2*pi).
    pub fn new(seg_type: SegmentType, angle: f64) -> Result<Self> {
        if angle.is_finite() && (0.0..TAU).contains(&angle) {
            Ok(Segment { seg_type, angle })
        } else {
            Err(Error::AngleOutOfRange(angle))
        }
    }

    /// Arc length of this segment at the given turn radius.
    pub fn arc_length(&self, r: TurnRadius) -> f64 {
        self.seg_type.radius(r) * self.angle
    }
}

/// Vehicle pose on the sphere: a proper rotation whose columns are the
/// position `X`, tangent `T`, and tangent-normal `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Configuration {
    matrix: Matrix3<f64>,
}

impl Configuration {
    /// The reference pose: position (1,0,0), tangent (0,1,0), normal (0,0,1).
    pub fn identity() -> Self {
        Configuration {
            matrix: Matrix3::identity(),
        }
    }

    /// Validates that `matrix` is orthonormal and has determinant +1.
    ///
    /// Inputs are validated, not repaired; use [`Configuration::reprojected`]
    /// to opt into re-orthonormalization.
    pub fn new(matrix: Matrix3<f64>) -> Result<Self> {
        let defect = orthonormal_defect(&matrix);
        if defect > TOL.rotation_check {
            return Err(Error::NotRotation(format!(
                "columns not orthonormal (defect {defect:.3e} > {:.0e})",
                TOL.rotation_check
            )));
        }
        let det = matrix.determinant();
        if (det - 1.0).abs() > TOL.rotation_check {
            return Err(Error::NotRotation(format!(
                "determinant {det} != 1 (improper rotation or reflection)"
            )));
        }
        Ok(Configuration { matrix })
    }

    /// Builds a configuration from a near-rotation by projecting onto SO(3)
    /// (polar decomposition). Opt-in repair for callers that accumulated
    /// drift; `new` deliberately does not do this.
    pub fn reprojected(matrix: Matrix3<f64>) -> Result<Self> {
        let q = polar_rotation(&matrix)
            .ok_or_else(|| Error::NotRotation("matrix is singular or reflects".into()))?;
        Configuration::new(q)
    }

    /// Internal constructor for matrices that are rotations by construction
    /// (products of validated rotations).
    pub(crate) fn from_rotation(matrix: Matrix3<f64>) -> Self {
        Configuration { matrix }
    }

    /// The underlying rotation matrix.
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    /// Position on the sphere (first column).
    pub fn position(&self) -> Vector3<f64> {
        self.matrix.column(0).into_owned()
    }

    /// Unit tangent (second column).
    pub fn tangent(&self) -> Vector3<f64> {
        self.matrix.column(1).into_owned()
    }

    /// Tangent-normal (third column).
    pub fn tangent_normal(&self) -> Vector3<f64> {
        self.matrix.column(2).into_owned()
    }
}

/// Max-abs entry of `m^T m - I`.
pub fn orthonormal_defect(m: &Matrix3<f64>) -> f64 {
    let gram = m.transpose() * m - Matrix3::identity();
    gram.iter().fold(0.0f64, |acc, &e| acc.max(e.abs()))
}

/// Nearest rotation to `m` via the polar decomposition, computed with the
/// Newton iteration `Q <- (Q + Q^{-T}) / 2`. Returns `None` when `m` is
/// singular or orientation-reversing.
pub fn polar_rotation(m: &Matrix3<f64>) -> Option<Matrix3<f64>> {
    if m.determinant() <= 0.0 {
        return None;
    }
    let mut q = *m;
    for _ in 0..16 {
        let inv_t = q.try_inverse()?.transpose();
        let next = (q + inv_t) * 0.5;
        let delta = (next - q).abs().max();
        q = next;
        if delta < 1e-15 {
            break;
        }
    }
    Some(q)
}

fn rotation_g(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn rotation_l(r: f64, angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    let lat = (1.0 - r * r).sqrt();
    let b11 = 1.0 - (1.0 - c) * r * r;
    let b13 = (1.0 - c) * r * lat;
    let b23 = s * lat;
    let b33 = c + (1.0 - c) * r * r;
    Matrix3::new(b11, -r * s, b13, r * s, c, -b23, b13, b23, b33)
}

fn rotation_r(r: f64, angle: f64) -> Matrix3<f64> {
    // Mirror of the left turn: conjugation by diag(1, 1, -1) flips the sign
    // of exactly the (1,3), (2,3), (3,1), (3,2) entries.
    let (s, c) = angle.sin_cos();
    let lat = (1.0 - r * r).sqrt();
    let b11 = 1.0 - (1.0 - c) * r * r;
    let b13 = (1.0 - c) * r * lat;
    let b23 = s * lat;
    let b33 = c + (1.0 - c) * r * r;
    Matrix3::new(b11, -r * s, -b13, r * s, c, b23, -b13, -b23, b33)
}

pub(crate) fn rotation_for(seg_type: SegmentType, r: TurnRadius, angle: f64) -> Matrix3<f64> {
    match seg_type {
        SegmentType::G => rotation_g(angle),
        SegmentType::L => rotation_l(r.get(), angle),
        SegmentType::R => rotation_r(r.get(), angle),
    }
}

/// Closed-form rotation advancing a pose through one segment.
///
/// For a great-circle arc this is a rotation about the pole of the equator
/// through the start point; for tight turns it is a rotation about the
/// (fixed) turn-circle axis. The result is always in SO(3).
pub fn segment_rotation(seg_type: SegmentType, r: TurnRadius, angle: f64) -> Result<Matrix3<f64>> {
    if !(angle.is_finite() && (0.0..TAU).contains(&angle)) {
        return Err(Error::AngleOutOfRange(angle));
    }
    Ok(rotation_for(seg_type, r, angle))
}

/// Generator of the frame ODE `R' = R * frame_generator(u_g)`.
pub fn frame_generator(u_g: f64) -> Matrix3<f64> {
    Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, -u_g, 0.0, u_g, 0.0)
}

/// Fixed-step RK4 integration of the frame ODE `R' = R * Omega(u_g)` over an
/// arc length `s`, with per-step orthonormal re-projection.
///
/// This exists only as an independent cross-check for [`segment_rotation`];
/// the planner never calls it.
pub fn integrate_frame(
    r0: &Configuration,
    u_g: f64,
    arc_length: f64,
    step: f64,
) -> Result<Configuration> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "integrator step must be > 0: got {step}"
        )));
    }
    if !(arc_length.is_finite() && arc_length >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "arc length must be >= 0: got {arc_length}"
        )));
    }
    if arc_length == 0.0 {
        return Ok(*r0);
    }
    let omega = frame_generator(u_g);
    let n = (arc_length / step).ceil().max(1.0) as usize;
    let h = arc_length / n as f64;
    let mut m = *r0.matrix();
    for _ in 0..n {
        let k1 = m * omega;
        let k2 = (m + k1 * (h / 2.0)) * omega;
        let k3 = (m + k2 * (h / 2.0)) * omega;
        let k4 = (m + k3 * h) * omega;
        m += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        m = polar_rotation(&m).ok_or_else(|| {
            Error::NotRotation("integration step left the rotation manifold".into())
        })?;
    }
    Ok(Configuration::from_rotation(m))
}

/// Final location of a segment word applied from `r0`:
/// `(r0 * prod_i segment_rotation(s_i)) * e1`.
pub fn path_endpoint(r0: &Configuration, segments: &[Segment], r: TurnRadius) -> Vector3<f64> {
    let mut m = *r0.matrix();
    for seg in segments {
        m *= rotation_for(seg.seg_type, r, seg.angle);
    }
    m.column(0).into_owned()
}

/// `n` poses uniformly spaced in arc length along a segment word, from the
/// start pose to the path endpoint inclusive.
pub fn sample_path(
    r0: &Configuration,
    segments: &[Segment],
    r: TurnRadius,
    n: usize,
) -> Result<Vec<(f64, Configuration)>> {
    if n < 2 {
        return Err(Error::SampleCount(n));
    }
    let lengths: Vec<f64> = segments.iter().map(|s| s.arc_length(r)).collect();
    let total: f64 = lengths.iter().sum();

    // Pose at the start of each segment.
    let mut prefixes = Vec::with_capacity(segments.len() + 1);
    let mut m = *r0.matrix();
    prefixes.push(m);
    for seg in segments {
        m *= rotation_for(seg.seg_type, r, seg.angle);
        prefixes.push(m);
    }

    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let s = total * i as f64 / (n - 1) as f64;
        if total == 0.0 {
            out.push((0.0, *r0));
            continue;
        }
        // Locate the segment containing s; the final point belongs to the
        // last non-empty segment.
        let mut start = 0.0;
        let mut frame = prefixes[segments.len()];
        for (j, seg) in segments.iter().enumerate() {
            let end = start + lengths[j];
            if s < end || (j == segments.len() - 1 && s <= end + 1e-12) {
                let local = ((s - start) / seg.seg_type.radius(r)).clamp(0.0, seg.angle);
                frame = prefixes[j] * rotation_for(seg.seg_type, r, local);
                break;
            }
            start = end;
        }
        out.push((s, Configuration::from_rotation(frame)));
    }
    Ok(out)
}
