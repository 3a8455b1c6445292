//! Numeric verification of the optimality structure behind the candidate
//! set: the costate flow, the Hamiltonian, the phase-portrait invariant of
//! bang arcs, and the identities of the turn-pair replacement argument
//! (an `L_pi R_pi` double half-turn is never shorter than the `LG` path to
//! the same location).

use nalgebra::{Matrix3, Vector3};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};

use crate::{Error, Result};

/// Costate triple `(A, B, C)` driving the control structure: `A` is the
/// switching function (the coefficient of the control in the Hamiltonian),
/// `B` its arc-length derivative, and `C` the drift term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjointState {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl AdjointState {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        AdjointState { a, b, c }
    }

    /// `A^2 + B^2 + C^2`; conserved along the flow under any control.
    pub fn norm_squared(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c
    }

    fn vector(&self) -> Vector3<f64> {
        Vector3::new(self.a, self.b, self.c)
    }

    fn from_vector(v: Vector3<f64>) -> Self {
        AdjointState {
            a: v.x,
            b: v.y,
            c: v.z,
        }
    }
}

/// Generator of the costate flow `psi' = costate_generator(u_g) * psi`,
/// i.e. `A' = B`, `B' = -A + u_g C`, `C' = -u_g B`.
pub fn costate_generator(u_g: f64) -> Matrix3<f64> {
    Matrix3::new(0.0, 1.0, 0.0, -1.0, 0.0, u_g, 0.0, -u_g, 0.0)
}

fn rotation_about(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let k = Matrix3::new(
        0.0, -axis.z, axis.y, axis.z, 0.0, -axis.x, -axis.y, axis.x, 0.0,
    );
    Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

/// Closed-form propagation of the costate over arc length `ds` under a
/// constant control: the generator is skew with axis `(-u, 0, -1)/omega` and
/// rate `omega = sqrt(1 + u^2)`, so the flow is a rotation by `omega * ds`.
pub fn propagate(psi: AdjointState, u_g: f64, ds: f64) -> AdjointState {
    let omega = (1.0 + u_g * u_g).sqrt();
    let axis = Vector3::new(-u_g, 0.0, -1.0) / omega;
    AdjointState::from_vector(rotation_about(&axis, omega * ds) * psi.vector())
}

/// Integrates the costate flow through piecewise-constant controls
/// `(u_g, ds)`, returning samples at spacing `step` plus exact piece
/// boundaries. Within a piece every sample is evaluated in closed form from
/// the piece anchor, so error does not accumulate with the sample count.
pub fn adjoint_flow(
    psi0: AdjointState,
    controls: &[(f64, f64)],
    step: f64,
) -> Result<Vec<(f64, AdjointState)>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sampling step must be > 0: got {step}"
        )));
    }
    let mut out = vec![(0.0, psi0)];
    let mut anchor = psi0;
    let mut s0 = 0.0;
    for &(u_g, ds) in controls {
        if !(ds.is_finite() && ds >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "piece length must be >= 0: got {ds}"
            )));
        }
        if ds == 0.0 {
            continue;
        }
        let n = (ds / step).ceil().max(1.0) as usize;
        for k in 1..=n {
            let offset = ds * k as f64 / n as f64;
            out.push((s0 + offset, propagate(anchor, u_g, offset)));
        }
        anchor = propagate(anchor, u_g, ds);
        s0 += ds;
    }
    Ok(out)
}

/// Hamiltonian `e + C + u_g A`; identically zero along optimal extremals.
pub fn hamiltonian(psi: &AdjointState, u_g: f64, e: f64) -> f64 {
    e + psi.c + u_g * psi.a
}

/// Phase-portrait invariant `A^2 + (dA/ds)^2 / (1 + u_max^2)` of bang arcs;
/// equals the squared amplitude `lambda^2` along abnormal extremals.
pub fn phase_invariant(a: f64, da: f64, u_max: f64) -> f64 {
    a * a + da * da / (1.0 + u_max * u_max)
}

/// Amplitude/phase form of the switching function on abnormal bang arcs:
/// `A(s) = lambda * sin(sqrt(1 + u_max^2) * s - phase)` with `lambda > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbnormalSolution {
    pub lambda: f64,
    pub phase: f64,
}

impl AbnormalSolution {
    /// Recovers amplitude and phase from `A(0)` and `B(0) = A'(0)`.
    pub fn from_state(a0: f64, b0: f64, u_max: f64) -> Result<Self> {
        let omega = (1.0 + u_max * u_max).sqrt();
        let lambda = phase_invariant(a0, b0, u_max).sqrt();
        if lambda <= 1e-300 {
            return Err(Error::InvalidParameter(
                "abnormal solution requires a nonzero amplitude".into(),
            ));
        }
        // A(0) = -lambda sin(phase), A'(0) = lambda omega cos(phase).
        let phase = (-a0 / lambda).atan2(b0 / (lambda * omega));
        Ok(AbnormalSolution { lambda, phase })
    }

    /// The switching function at arc length `s`.
    pub fn evaluate(&self, s: f64, u_max: f64) -> f64 {
        let omega = (1.0 + u_max * u_max).sqrt();
        self.lambda * (omega * s - self.phase).sin()
    }

    /// Its arc-length derivative.
    pub fn derivative(&self, s: f64, u_max: f64) -> f64 {
        let omega = (1.0 + u_max * u_max).sqrt();
        self.lambda * omega * (omega * s - self.phase).cos()
    }
}

/// Costate trajectory under the bang switching law `u = -u_max * sign(A)`.
#[derive(Debug, Clone)]
pub struct SwitchingTrajectory {
    /// `(s, psi, u)` samples, including the exact switch points.
    pub samples: Vec<(f64, AdjointState, f64)>,
    /// Arc lengths where `A = 0` (switching instants), including `s = 0`
    /// when the trajectory starts on a switch.
    pub zero_crossings: Vec<f64>,
}

/// Simulates the switching law `u = -u_max * sign(A)` from `psi0` for
/// `total_length`, locating every zero of `A` by bisection on the
/// closed-form flow.
pub fn simulate_bang_switching(
    psi0: AdjointState,
    u_max: f64,
    total_length: f64,
    sample_step: f64,
) -> Result<SwitchingTrajectory> {
    if !(sample_step.is_finite() && sample_step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sampling step must be > 0: got {sample_step}"
        )));
    }
    if !(total_length.is_finite() && total_length >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "trajectory length must be >= 0: got {total_length}"
        )));
    }
    let scale = psi0.norm_squared().sqrt().max(1e-300);
    let arm_threshold = 1e-9 * scale;

    let control_for = |psi: &AdjointState| -> f64 {
        if psi.a.abs() > arm_threshold {
            -u_max * psi.a.signum()
        } else {
            // On a switch: the sign of A just ahead is the sign of B.
            -u_max * psi.b.signum()
        }
    };

    let mut samples = Vec::new();
    let mut zeros = Vec::new();
    let mut anchor = psi0;
    let mut anchor_s = 0.0;
    let mut u = control_for(&psi0);
    if psi0.a.abs() <= arm_threshold {
        zeros.push(0.0);
    }
    samples.push((0.0, psi0, u));

    // Within a piece A is smooth; crossings are only sought once |A| has
    // exceeded the arming threshold so the zero that starts the piece is not
    // re-detected.
    let mut armed = psi0.a.abs() > arm_threshold;
    let mut prev_offset = 0.0;
    let mut prev_a = psi0.a;
    while anchor_s + prev_offset < total_length {
        let offset = (prev_offset + sample_step).min(total_length - anchor_s);
        let psi = propagate(anchor, u, offset);
        if !armed && psi.a.abs() > arm_threshold {
            armed = true;
            prev_a = psi.a;
            prev_offset = offset;
            samples.push((anchor_s + offset, psi, u));
            continue;
        }
        if armed && prev_a * psi.a <= 0.0 && prev_a != psi.a {
            // Bisect the crossing inside (prev_offset, offset].
            let (mut lo, mut hi) = (prev_offset, offset);
            let mut a_lo = prev_a;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let a_mid = propagate(anchor, u, mid).a;
                if a_lo * a_mid <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    a_lo = a_mid;
                }
                if hi - lo < 1e-15 {
                    break;
                }
            }
            let cross_offset = 0.5 * (lo + hi);
            let cross_s = anchor_s + cross_offset;
            let psi_cross = propagate(anchor, u, cross_offset);
            zeros.push(cross_s);
            anchor = psi_cross;
            anchor_s = cross_s;
            u = -u_max * psi_cross.b.signum();
            armed = false;
            prev_offset = 0.0;
            prev_a = psi_cross.a;
            samples.push((cross_s, psi_cross, u));
            continue;
        }
        samples.push((anchor_s + offset, psi, u));
        prev_a = psi.a;
        prev_offset = offset;
        if anchor_s + offset >= total_length {
            break;
        }
    }
    Ok(SwitchingTrajectory {
        samples,
        zero_crossings: zeros,
    })
}

fn replacement_domain(operation: &'static str, r: f64) -> Result<()> {
    if r.is_finite() && (0.0..=FRAC_1_SQRT_2).contains(&r) {
        Ok(())
    } else {
        Err(Error::AnalysisDomain {
            operation,
            range: "[0, 1/sqrt(2)]",
            value: r,
        })
    }
}

/// Angles `(phi1, phi2)` of the `LG` path that reaches the same location as
/// the `L_pi R_pi` double half-turn of radius `r`.
///
/// `phi2 = arccos(1 - 4r^2)` and `phi1 = pi/2 + gamma` with
/// `sin(gamma) = (1 - 4r^2)/(3 - 4r^2)`,
/// `cos(gamma) = 2 sqrt(2) sqrt(1 - 2r^2)/(3 - 4r^2)`; the closed forms are
/// already continuous at `r = 0` where they take the values 1/3 and
/// `2 sqrt(2)/3`.
pub fn lg_replacement_angles(r: f64) -> Result<(f64, f64)> {
    replacement_domain("lg_replacement_angles", r)?;
    let r2 = r * r;
    let denom = 3.0 - 4.0 * r2;
    let sin_gamma = (1.0 - 4.0 * r2) / denom;
    // f64 rounding can push 1 - 2r^2 fractionally below zero at the top of
    // the domain.
    let cos_gamma = 2.0 * SQRT_2 * (1.0 - 2.0 * r2).max(0.0).sqrt() / denom;
    let gamma = sin_gamma.atan2(cos_gamma);
    let phi1 = FRAC_PI_2 + gamma;
    let phi2 = (1.0 - 4.0 * r2).clamp(-1.0, 1.0).acos();
    Ok((phi1, phi2))
}

/// Length saved by replacing the `L_pi R_pi` pair with the equivalent `LG`
/// path: `2 pi r - r phi1 - phi2`. Nonnegative on the whole domain and zero
/// only at `r = 0`.
pub fn lg_replacement_gain(r: f64) -> Result<f64> {
    let (phi1, phi2) = lg_replacement_angles(r)?;
    Ok(2.0 * PI * r - r * phi1 - phi2)
}

/// Derivative of [`lg_replacement_gain`] in closed form:
/// `3 pi/2 - arctan((1 - 4r^2) / (2 sqrt(2 (1 - 2r^2)))) - 6 sqrt(2 (1 - 2r^2)) / (3 - 4r^2)`.
///
/// Valid on `[0, 1/2) U (1/2, 1/sqrt(2))`; the gain expression is not
/// differentiable at `r = 1/2`, which is rejected.
pub fn lg_replacement_gain_derivative(r: f64) -> Result<f64> {
    let ok = r.is_finite() && (0.0..FRAC_1_SQRT_2).contains(&r) && r != 0.5;
    if !ok {
        return Err(Error::AnalysisDomain {
            operation: "lg_replacement_gain_derivative",
            range: "[0, 1/2) U (1/2, 1/sqrt(2))",
            value: r,
        });
    }
    let r2 = r * r;
    let root = (2.0 * (1.0 - 2.0 * r2)).sqrt();
    Ok(1.5 * PI - ((1.0 - 4.0 * r2) / (2.0 * root)).atan() - 6.0 * root / (3.0 - 4.0 * r2))
}

/// Strictly positive lower bound on [`lg_replacement_gain_derivative`] over
/// its whole domain: `3 pi/2 - arctan(1/(2 sqrt(2))) - 3`.
pub fn gain_derivative_lower_bound() -> f64 {
    1.5 * PI - (1.0 / (2.0 * SQRT_2)).atan() - 3.0
}
