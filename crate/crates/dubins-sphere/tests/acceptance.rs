//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured quantities (run with `--nocapture` to see them).

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2, TAU};
use std::time::Instant;

use dubins_sphere::analysis::{
    gain_derivative_lower_bound, lg_replacement_angles, lg_replacement_gain,
    lg_replacement_gain_derivative,
};
use dubins_sphere::geometry::{
    integrate_frame, orthonormal_defect, path_endpoint, segment_rotation, Configuration, Segment,
    SegmentType, TurnRadius,
};
use dubins_sphere::oracle::{self, GridSpec};
use dubins_sphere::planner;
use dubins_sphere::solvers::{self, PathType, SolutionBranch, TargetLocal};
use dubins_sphere::verification::{run_checks, VerifyConfig};

fn report(number: u32, name: &str, passed: bool, detail: &str) {
    println!(
        "{} criterion {number} ({name}): {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {number} ({name}): {detail}");
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let theta: f64 = rng.random_range(0.0..TAU);
    let s = (1.0 - z * z).sqrt();
    Vector3::new(s * theta.cos(), s * theta.sin(), z)
}

#[test]
fn criterion_1_reference_instance_reproduction() {
    let target = Vector3::new(0.6942, 0.5498, 0.4646).normalize();
    let r = TurnRadius::new(0.4).unwrap();

    let start = Instant::now();
    let plan = planner::plan(&Configuration::identity(), &target, r).unwrap();
    let elapsed = start.elapsed();

    let count = |ty: PathType| {
        plan.candidates
            .iter()
            .filter(|c| c.path_type == ty)
            .count()
    };
    let best = plan.optimal();
    let passed = best.path_type == PathType::Lg
        && count(PathType::Lg) >= 1
        && count(PathType::Rg) >= 1
        && count(PathType::Lr) >= 1
        && best.residual <= 1e-8
        && elapsed.as_millis() < 100;
    report(
        1,
        "reference instance",
        passed,
        &format!(
            "optimal={} length={:.9} residual={:.3e} LG/RG/LR counts={}/{}/{} runtime={:?}",
            best.path_type,
            best.length,
            best.residual,
            count(PathType::Lg),
            count(PathType::Rg),
            count(PathType::Lr),
            elapsed
        ),
    );
}

#[test]
fn criterion_2_replacement_identities() {
    let (p1_half, p2_half) = lg_replacement_angles(0.5).unwrap();
    let (p1_top, p2_top) = lg_replacement_angles(FRAC_1_SQRT_2).unwrap();
    let gain_half = lg_replacement_gain(0.5).unwrap();
    let gain_top = lg_replacement_gain(FRAC_1_SQRT_2).unwrap();

    let angle_err = (p1_half - FRAC_PI_2)
        .abs()
        .max((p2_half - FRAC_PI_2).abs())
        .max(p1_top.abs())
        .max((p2_top - PI).abs());
    let gain_err = (gain_half - PI / 4.0)
        .abs()
        .max((gain_top - (SQRT_2 - 1.0) * PI).abs());
    let passed = angle_err <= 1e-10 && gain_err <= 1e-12;
    report(
        2,
        "replacement identities",
        passed,
        &format!("max angle error {angle_err:.3e} (tol 1e-10), max gain error {gain_err:.3e} (tol 1e-12)"),
    );
}

#[test]
fn criterion_3_gain_positivity_and_derivative() {
    let n = 1000;
    let lo = 0.001;
    let mut min_gain = f64::INFINITY;
    for i in 1..=n {
        let r = (lo + (FRAC_1_SQRT_2 - lo) * i as f64 / n as f64).min(FRAC_1_SQRT_2);
        min_gain = min_gain.min(lg_replacement_gain(r).unwrap());
    }

    let bound = gain_derivative_lower_bound();
    let mut min_derivative = f64::INFINITY;
    let mut checked = 0;
    for i in 0..n {
        let r = (FRAC_1_SQRT_2 - 2e-3) * i as f64 / n as f64;
        if (r - 0.5).abs() < 1e-9 {
            continue;
        }
        min_derivative = min_derivative.min(lg_replacement_gain_derivative(r).unwrap());
        checked += 1;
    }

    let mut max_fd_err = 0.0f64;
    let h = 1e-5;
    let mut fd_samples: Vec<f64> = (1..=9).map(|i| 0.05 * i as f64).collect();
    fd_samples.extend([0.52, 0.55, 0.60, 0.65, 0.70]);
    for &r in &fd_samples {
        let fd = (lg_replacement_gain(r + h).unwrap() - lg_replacement_gain(r - h).unwrap())
            / (2.0 * h);
        max_fd_err = max_fd_err.max((fd - lg_replacement_gain_derivative(r).unwrap()).abs());
    }

    let passed = min_gain > 0.0 && min_derivative > bound && checked >= 999 && max_fd_err <= 1e-6;
    report(
        3,
        "gain positivity sweep",
        passed,
        &format!(
            "min gain {min_gain:.6e} over {n} radii; min derivative {min_derivative:.6} > bound {bound:.6} over {checked} radii; max finite-difference error {max_fd_err:.3e} (tol 1e-6)"
        ),
    );
}

#[test]
fn criterion_4_forward_model_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut max_gap = 0.0f64;
    let mut max_defect = 0.0f64;
    for ty in SegmentType::ALL {
        for _ in 0..100 {
            let r = TurnRadius::new(rng.random_range(0.05..=FRAC_1_SQRT_2)).unwrap();
            let phi: f64 = rng.random_range(0.0..TAU);
            let closed = segment_rotation(ty, r, phi).unwrap();
            let arc = ty.radius(r) * phi;
            let stepped = integrate_frame(
                &Configuration::identity(),
                ty.geodesic_curvature(r),
                arc,
                1e-4,
            )
            .unwrap();
            max_gap = max_gap.max((closed - stepped.matrix()).abs().max());
            max_defect = max_defect
                .max(orthonormal_defect(&closed))
                .max((closed.determinant() - 1.0).abs());
        }
    }
    let passed = max_gap <= 1e-8 && max_defect <= 1e-12;
    report(
        4,
        "forward model equivalence",
        passed,
        &format!(
            "max closed-form vs RK4 entry gap {max_gap:.3e} (tol 1e-8); max SO(3) defect {max_defect:.3e} (tol 1e-12) over 300 draws"
        ),
    );
}

#[test]
fn criterion_5_oracle_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = GridSpec::default();
    let start = Instant::now();
    let mut worst_gap = f64::NEG_INFINITY;
    let mut worst_residual = 0.0f64;
    let mut infeasible = 0usize;
    let n = 500;
    for i in 0..n {
        let r = TurnRadius::new(rng.random_range(0.1..=0.5)).unwrap();
        let target = random_unit(&mut rng);
        let plan = planner::plan(&Configuration::identity(), &target, r)
            .unwrap_or_else(|e| panic!("instance {i}: planner failed: {e}"));
        let result = oracle::search(&Configuration::identity(), &target, r, &grid)
            .unwrap_or_else(|e| panic!("instance {i}: oracle failed: {e}"));
        worst_residual = worst_residual.max(plan.optimal().residual);
        match result.best {
            Some(best) => {
                let gap = plan.optimal().length - best.length;
                worst_gap = worst_gap.max(gap);
                assert!(
                    gap <= result.resolution_bound,
                    "instance {i}: planner {} vs oracle {} + bound {}",
                    plan.optimal().length,
                    best.length,
                    result.resolution_bound
                );
            }
            None => infeasible += 1,
        }
    }
    let elapsed = start.elapsed();
    let bound = grid.resolution_bound(TurnRadius::new(0.5).unwrap());
    let passed = worst_gap <= bound && worst_residual <= 1e-8 && infeasible == 0
        && elapsed.as_secs() <= 600;
    report(
        5,
        "oracle consistency",
        passed,
        &format!(
            "{n} instances: worst planner-minus-oracle gap {worst_gap:.6e} (bound {bound:.6e}), worst planner residual {worst_residual:.3e} (tol 1e-8), {infeasible} oracle-infeasible, runtime {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_6_costate_property_suite() {
    let results = run_checks(&VerifyConfig::default());
    let find = |name: &str| {
        results
            .iter()
            .find(|c| c.name == name)
            .unwrap_or_else(|| panic!("missing check {name}"))
    };
    let conservation = find("costate-norm-conservation");
    let hamilton = find("hamiltonian-constancy");
    let spacing = find("inflection-spacing");
    let invariant = find("phase-invariant-constancy");
    let passed =
        conservation.passed && hamilton.passed && spacing.passed && invariant.passed;
    report(
        6,
        "costate property suite",
        passed,
        &format!(
            "norm drift {:.3e} (tol {:.0e}); max |H| {:.3e} (tol {:.0e}); switch spacing error {:.3e} (tol {:.0e}); phase invariant drift {:.3e} (tol {:.0e})",
            conservation.measured,
            conservation.threshold,
            hamilton.measured,
            hamilton.threshold,
            spacing.measured,
            spacing.threshold,
            invariant.measured,
            invariant.threshold
        ),
    );
}

#[test]
fn criterion_7_round_trip_inversion() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let classes = [PathType::Lg, PathType::Rg, PathType::Lr, PathType::Rl];
    let total = 10_000;
    let mut worst_angle_gap = 0.0f64;
    let mut worst_residual = 0.0f64;
    let mut filter_violations = 0usize;
    for i in 0..total {
        let class = classes[i % classes.len()];
        let r = TurnRadius::new(rng.random_range(0.1..=0.5)).unwrap();
        let phi1: f64 = rng.random_range(0.0..TAU);
        let phi2: f64 = match class {
            PathType::Lr | PathType::Rl => rng.random_range(PI..TAU),
            _ => rng.random_range(0.0..TAU),
        };
        let (first, second) = class.segment_types();
        let segments = [
            Segment::new(first.unwrap(), phi1).unwrap(),
            Segment::new(second.unwrap(), phi2).unwrap(),
        ];
        let target = path_endpoint(&Configuration::identity(), &segments, r);
        let local = TargetLocal::new(target.normalize()).unwrap();
        let branches: Vec<SolutionBranch> = match class {
            PathType::Lg => solvers::solve_lg(&local, r),
            PathType::Rg => solvers::solve_rg(&local, r),
            PathType::Lr => solvers::solve_lr(&local, r),
            PathType::Rl => solvers::solve_rl(&local, r),
            _ => unreachable!(),
        };
        let gap = branches
            .iter()
            .map(|b| (b.phi1 - phi1).abs().max((b.phi2 - phi2).abs()))
            .fold(f64::INFINITY, f64::min);
        assert!(
            gap <= 1e-9,
            "instance {i} ({class}): generated ({phi1}, {phi2}) at r={}, best angle gap {gap:e}, branches {branches:?}",
            r.get()
        );
        worst_angle_gap = worst_angle_gap.max(gap);
        for b in &branches {
            worst_residual = worst_residual.max(b.residual);
            if matches!(class, PathType::Lr | PathType::Rl) && b.phi2 < PI {
                filter_violations += 1;
            }
        }
    }
    let passed = worst_angle_gap <= 1e-9 && worst_residual <= 1e-9 && filter_violations == 0;
    report(
        7,
        "round-trip inversion",
        passed,
        &format!(
            "{total} forward-composed targets: worst recovered-angle gap {worst_angle_gap:.3e} (tol 1e-9), worst branch residual {worst_residual:.3e} (tol 1e-9), {filter_violations} second-angle filter violations"
        ),
    );
}
