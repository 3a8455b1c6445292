//! Named numeric check suite behind the `verify` command: each check runs a
//! deterministic experiment and reports the measured quantity against its
//! threshold. The same suite backs the library's acceptance tests.

use nalgebra::Vector3;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::analysis::{
    adjoint_flow, hamiltonian, lg_replacement_angles, lg_replacement_gain, phase_invariant,
    simulate_bang_switching, AdjointState,
};
use crate::geometry::{path_endpoint, Configuration, Segment, SegmentType, TurnRadius};

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// The measured quantity (a drift, a residual, or a minimum).
    pub measured: f64,
    pub threshold: f64,
    /// Human-readable statement of what was measured.
    pub detail: String,
}

/// Configuration for the check suite.
#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    /// Number of radius samples for the replacement-gain positivity sweep.
    pub gain_samples: usize,
    /// Replaces every check's threshold when set (for falsifiability runs).
    pub tolerance_override: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            gain_samples: 1000,
            tolerance_override: None,
        }
    }
}

fn threshold(cfg: &VerifyConfig, default: f64) -> f64 {
    cfg.tolerance_override.unwrap_or(default)
}

/// Runs the full check suite. Deterministic: fixed controls and fixed-stride
/// sampling, no randomness.
pub fn run_checks(cfg: &VerifyConfig) -> Vec<CheckResult> {
    vec![
        costate_norm_conservation(cfg),
        hamiltonian_constancy(cfg),
        replacement_gain_positive(cfg),
        replacement_endpoint_identity(cfg),
        inflection_spacing(cfg),
        phase_invariant_constancy(cfg),
    ]
}

/// `A^2 + B^2 + C^2` must be conserved along the costate flow under
/// piecewise-constant admissible controls over total arc length 10.
fn costate_norm_conservation(cfg: &VerifyConfig) -> CheckResult {
    let u = TurnRadius::new(0.4).unwrap().u_max();
    let psi0 = AdjointState::new(0.3, -0.4, 0.6);
    let controls = [
        (u, 2.0),
        (0.0, 1.5),
        (-u, 2.5),
        (0.5 * u, 1.5),
        (-0.3 * u, 2.5),
    ];
    let flow = adjoint_flow(psi0, &controls, 1e-3).expect("valid flow parameters");
    let expected = psi0.norm_squared();
    let drift = flow
        .iter()
        .map(|(_, psi)| (psi.norm_squared() - expected).abs())
        .fold(0.0f64, f64::max);
    let thr = threshold(cfg, 1e-10);
    CheckResult {
        name: "costate-norm-conservation",
        passed: drift <= thr,
        measured: drift,
        threshold: thr,
        detail: "max |psi|^2 drift along piecewise-constant controls, length 10".into(),
    }
}

/// With `H(0) = 0` and the switching law `u = -u_max sign(A)`, the
/// Hamiltonian `e + C + u A` must stay zero.
fn hamiltonian_constancy(cfg: &VerifyConfig) -> CheckResult {
    let u_max = TurnRadius::new(0.4).unwrap().u_max();
    let psi0 = AdjointState::new(0.0, 0.8, -1.0);
    let traj = simulate_bang_switching(psi0, u_max, 10.0, 1e-3).expect("valid simulation");
    let max_h = traj
        .samples
        .iter()
        .map(|(_, psi, u)| hamiltonian(psi, *u, 1.0).abs())
        .fold(0.0f64, f64::max);
    let thr = threshold(cfg, 1e-9);
    CheckResult {
        name: "hamiltonian-constancy",
        passed: max_h <= thr,
        measured: max_h,
        threshold: thr,
        detail: "max |H| along a sign-switching extremal of length 10".into(),
    }
}

/// The replacement gain `2 pi r - r phi1 - phi2` must be strictly positive
/// on (0.001, 1/sqrt(2)].
fn replacement_gain_positive(cfg: &VerifyConfig) -> CheckResult {
    let n = cfg.gain_samples.max(1);
    let lo = 0.001;
    let mut min_gain = f64::INFINITY;
    for i in 1..=n {
        // The affine sweep can round one ulp past the endpoint.
        let r = (lo + (FRAC_1_SQRT_2 - lo) * i as f64 / n as f64).min(FRAC_1_SQRT_2);
        let gain = lg_replacement_gain(r).expect("radius inside the analysis domain");
        min_gain = min_gain.min(gain);
    }
    let thr = threshold(cfg, 0.0);
    CheckResult {
        name: "replacement-gain-positive",
        passed: min_gain > thr,
        measured: min_gain,
        threshold: thr,
        detail: format!("min replacement gain over {n} radii in (0.001, 1/sqrt(2)], must exceed threshold"),
    }
}

/// The closed-form replacement angles must reproduce the endpoint of the
/// `L_pi R_pi` double half-turn, and the replacing `LG` path must be the
/// shorter of the two.
fn replacement_endpoint_identity(cfg: &VerifyConfig) -> CheckResult {
    let mut worst = 0.0f64;
    let mut shortens = true;
    let n = 200;
    for i in 1..=n {
        let r = FRAC_1_SQRT_2 * i as f64 / n as f64;
        let (p1, p2) = lg_replacement_angles(r).expect("radius inside the analysis domain");
        let radius = TurnRadius::new(r).unwrap();
        let mut segs = Vec::new();
        if p1 > 0.0 {
            segs.push(Segment::new(SegmentType::L, p1).unwrap());
        }
        if p2 > 0.0 {
            segs.push(Segment::new(SegmentType::G, p2).unwrap());
        }
        let end = path_endpoint(&Configuration::identity(), &segs, radius);
        let column = Vector3::new(
            1.0 + 8.0 * r.powi(4) - 8.0 * r * r,
            0.0,
            4.0 * (1.0 - 2.0 * r * r) * r * (1.0 - r * r).sqrt(),
        );
        worst = worst.max((end - column).norm());
        shortens &= r * p1 + p2 < 2.0 * r * PI + 1e-12;
    }
    let thr = threshold(cfg, 1e-9);
    CheckResult {
        name: "replacement-endpoint-identity",
        passed: worst <= thr && shortens,
        measured: worst,
        threshold: thr,
        detail: format!(
            "max endpoint mismatch of the LG replacement over {n} radii (and LG no longer than the turn pair)"
        ),
    }
}

/// Consecutive zeros of the switching function under bang control must be
/// spaced exactly `pi / sqrt(1 + u_max^2)` apart (turn angle pi).
fn inflection_spacing(cfg: &VerifyConfig) -> CheckResult {
    let u_max = TurnRadius::new(0.4).unwrap().u_max();
    let omega = (1.0 + u_max * u_max).sqrt();
    let psi0 = AdjointState::new(0.0, -omega, 0.0);
    let traj = simulate_bang_switching(psi0, u_max, 10.0, 1e-3).expect("valid simulation");
    let expected = PI / omega;
    let worst = traj
        .zero_crossings
        .windows(2)
        .map(|w| ((w[1] - w[0]) - expected).abs())
        .fold(0.0f64, f64::max);
    let enough = traj.zero_crossings.len() >= 4;
    let thr = threshold(cfg, 1e-10);
    CheckResult {
        name: "inflection-spacing",
        passed: enough && worst <= thr,
        measured: worst,
        threshold: thr,
        detail: format!(
            "max |spacing - pi/sqrt(1+u_max^2)| over {} switching instants",
            traj.zero_crossings.len()
        ),
    }
}

/// `A^2 + (dA/ds)^2/(1+u_max^2)` must stay at the squared amplitude along
/// abnormal bang arcs.
fn phase_invariant_constancy(cfg: &VerifyConfig) -> CheckResult {
    let u_max = TurnRadius::new(0.45).unwrap().u_max();
    let omega = (1.0 + u_max * u_max).sqrt();
    let psi0 = AdjointState::new(0.0, -omega, 0.0);
    let traj = simulate_bang_switching(psi0, u_max, 8.0, 1e-3).expect("valid simulation");
    let drift = traj
        .samples
        .iter()
        .map(|(_, psi, _)| (phase_invariant(psi.a, psi.b, u_max) - 1.0).abs())
        .fold(0.0f64, f64::max);
    let thr = threshold(cfg, 1e-10);
    CheckResult {
        name: "phase-invariant-constancy",
        passed: drift <= thr,
        measured: drift,
        threshold: thr,
        detail: "max phase-invariant drift along an abnormal bang trajectory".into(),
    }
}
