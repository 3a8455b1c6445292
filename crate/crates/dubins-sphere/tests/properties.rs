//! Property suites: forward-model algebra, solver round trips and mirror
//! consistency, planner invariances, and oracle sanity bounds.

use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use dubins_sphere::geometry::{
    integrate_frame, orthonormal_defect, path_endpoint, sample_path, segment_rotation,
    Configuration, Segment, SegmentType, TurnRadius,
};
use dubins_sphere::oracle::{self, GridSpec};
use dubins_sphere::planner;
use dubins_sphere::solvers::{self, PathType, TargetLocal};

fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let theta: f64 = rng.random_range(0.0..TAU);
    let s = (1.0 - z * z).sqrt();
    Vector3::new(s * theta.cos(), s * theta.sin(), z)
}

fn random_rotation(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    let axis = random_unit(rng);
    let angle: f64 = rng.random_range(0.0..TAU);
    let k = Matrix3::new(
        0.0, -axis.z, axis.y, axis.z, 0.0, -axis.x, -axis.y, axis.x, 0.0,
    );
    Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

fn mirror(v: &Vector3<f64>) -> Vector3<f64> {
    Vector3::new(v.x, v.y, -v.z)
}

#[test]
fn segment_rotations_stay_in_so3() {
    // 10^4 random (type, r, angle) draws.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..10_000 {
        let ty = SegmentType::ALL[i % 3];
        let r = TurnRadius::new(rng.random_range(0.01..=FRAC_1_SQRT_2)).unwrap();
        let phi: f64 = rng.random_range(0.0..TAU);
        let m = segment_rotation(ty, r, phi).unwrap();
        assert!(orthonormal_defect(&m) <= 1e-12);
        assert!((m.determinant() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn mirror_conjugation_is_exact() {
    let d = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let r = TurnRadius::new(rng.random_range(0.01..=FRAC_1_SQRT_2)).unwrap();
        let phi: f64 = rng.random_range(0.0..TAU);
        let left = segment_rotation(SegmentType::L, r, phi).unwrap();
        let right = segment_rotation(SegmentType::R, r, phi).unwrap();
        assert_eq!((right - d * left * d).abs().max(), 0.0);
    }
}

proptest! {
    #[test]
    fn segment_semigroup(
        ty_idx in 0usize..3,
        rr in 0.01f64..FRAC_1_SQRT_2,
        phi1 in 0.0f64..TAU,
        phi2 in 0.0f64..TAU,
    ) {
        let ty = SegmentType::ALL[ty_idx];
        let r = TurnRadius::new(rr).unwrap();
        let product = segment_rotation(ty, r, phi1).unwrap() * segment_rotation(ty, r, phi2).unwrap();
        let combined = segment_rotation(ty, r, (phi1 + phi2) % TAU).unwrap();
        prop_assert!((product - combined).abs().max() <= 1e-12);
    }

    #[test]
    fn two_segment_round_trip(
        class_idx in 0usize..4,
        rr in 0.1f64..=0.5,
        phi1 in 1e-3f64..(TAU - 1e-3),
        phi2_unit in 0.0f64..1.0,
    ) {
        let class = [PathType::Lg, PathType::Rg, PathType::Lr, PathType::Rl][class_idx];
        let phi2 = match class {
            PathType::Lr | PathType::Rl => PI + phi2_unit * (TAU - PI - 1e-3),
            _ => 1e-3 + phi2_unit * (TAU - 2e-3),
        };
        let r = TurnRadius::new(rr).unwrap();
        let (first, second) = class.segment_types();
        let segments = [
            Segment::new(first.unwrap(), phi1).unwrap(),
            Segment::new(second.unwrap(), phi2).unwrap(),
        ];
        let target = path_endpoint(&Configuration::identity(), &segments, r).normalize();
        let local = TargetLocal::new(target).unwrap();
        let branches = match class {
            PathType::Lg => solvers::solve_lg(&local, r),
            PathType::Rg => solvers::solve_rg(&local, r),
            PathType::Lr => solvers::solve_lr(&local, r),
            PathType::Rl => solvers::solve_rl(&local, r),
            _ => unreachable!(),
        };
        prop_assert!(
            branches
                .iter()
                .any(|b| (b.phi1 - phi1).abs() <= 1e-8 && (b.phi2 - phi2).abs() <= 1e-8),
            "no branch recovers ({phi1}, {phi2}) for {class}: {branches:?}"
        );
        for b in &branches {
            prop_assert!(b.residual <= 1e-9);
        }
    }
}

#[test]
fn mirror_consistency_branch_for_branch() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let r = TurnRadius::new(rng.random_range(0.1..=0.5)).unwrap();
        let target = random_unit(&mut rng);
        let local = TargetLocal::new(target).unwrap();
        let mirrored = TargetLocal::new(mirror(&target)).unwrap();

        let rg = solvers::solve_rg(&local, r);
        let lg_mirrored = solvers::solve_lg(&mirrored, r);
        assert_eq!(rg.len(), lg_mirrored.len());
        for (a, b) in rg.iter().zip(&lg_mirrored) {
            assert!((a.phi1 - b.phi1).abs() <= 1e-9 && (a.phi2 - b.phi2).abs() <= 1e-9);
            assert_eq!(a.path_type, PathType::Rg);
            assert_eq!(b.path_type, PathType::Lg);
        }

        let rl = solvers::solve_rl(&local, r);
        let lr_mirrored = solvers::solve_lr(&mirrored, r);
        assert_eq!(rl.len(), lr_mirrored.len());
        for (a, b) in rl.iter().zip(&lr_mirrored) {
            assert!((a.phi1 - b.phi1).abs() <= 1e-9 && (a.phi2 - b.phi2).abs() <= 1e-9);
        }
    }
}

#[test]
fn half_turn_pair_family_second_angle_cosine() {
    // For the family of L_pi R_pi endpoints, the LG branch satisfies
    // cos(phi2) = 1 - 4 r^2 across the whole radius domain.
    let n = 150;
    for i in 1..=n {
        let rr = FRAC_1_SQRT_2 * i as f64 / n as f64;
        let r = TurnRadius::new(rr).unwrap();
        let column = Vector3::new(
            1.0 + 8.0 * rr.powi(4) - 8.0 * rr * rr,
            0.0,
            4.0 * (1.0 - 2.0 * rr * rr) * rr * (1.0 - rr * rr).sqrt(),
        );
        let local = TargetLocal::new(column.normalize()).unwrap();
        let branches = solvers::solve_lg(&local, r);
        assert!(!branches.is_empty(), "no LG branch at r = {rr}");
        for b in &branches {
            assert!(
                (b.phi2.cos() - (1.0 - 4.0 * rr * rr)).abs() <= 1e-10,
                "r = {rr}: cos(phi2) = {} vs {}",
                b.phi2.cos(),
                1.0 - 4.0 * rr * rr
            );
        }
    }
}

#[test]
fn scan_fallback_agrees_with_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..50 {
        let r = TurnRadius::new(rng.random_range(0.1..=0.5)).unwrap();
        let phi1: f64 = rng.random_range(0.2..6.0);
        let phi2: f64 = rng.random_range(0.2..6.0);
        let segments = [
            Segment::new(SegmentType::L, phi1).unwrap(),
            Segment::new(SegmentType::G, phi2).unwrap(),
        ];
        let target = path_endpoint(&Configuration::identity(), &segments, r).normalize();
        let local = TargetLocal::new(target).unwrap();
        let closed = solvers::solve_lg(&local, r);
        let scanned = solvers::solve_lg_scan(&local, r);
        assert_eq!(closed.len(), scanned.len(), "closed {closed:?} scan {scanned:?}");
        for (c, s) in closed.iter().zip(&scanned) {
            assert!((c.phi1 - s.phi1).abs() <= 1e-8);
            assert!((c.phi2 - s.phi2).abs() <= 1e-8);
        }
    }
}

#[test]
fn planner_candidates_are_feasible_and_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..100 {
        let r = TurnRadius::new(rng.random_range(0.1..=0.5)).unwrap();
        let target = random_unit(&mut rng);
        let plan_a = planner::plan(&Configuration::identity(), &target, r).unwrap();
        let plan_b = planner::plan(&Configuration::identity(), &target, r).unwrap();
        assert_eq!(plan_a.candidates.len(), plan_b.candidates.len());
        assert_eq!(plan_a.optimal, plan_b.optimal);
        for (a, b) in plan_a.candidates.iter().zip(&plan_b.candidates) {
            assert_eq!(a.path_type, b.path_type);
            assert_eq!(a.length.to_bits(), b.length.to_bits());
        }
        for c in &plan_a.candidates {
            assert!(c.residual <= 1e-9);
            assert!(c.length >= 0.0);
            if matches!(c.path_type, PathType::Lr | PathType::Rl) {
                assert!(c.phi2 >= PI);
            }
        }
    }
}

#[test]
fn planner_is_frame_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..20 {
        let r = TurnRadius::new(rng.random_range(0.1..=0.5)).unwrap();
        let target = random_unit(&mut rng);
        let base = planner::plan(&Configuration::identity(), &target, r).unwrap();

        let q = random_rotation(&mut rng);
        let moved = planner::plan(
            &Configuration::new(q).unwrap(),
            &(q * target),
            r,
        )
        .unwrap();
        assert_eq!(base.candidates.len(), moved.candidates.len());
        for (a, b) in base.candidates.iter().zip(&moved.candidates) {
            assert_eq!(a.path_type, b.path_type);
            assert!((a.length - b.length).abs() <= 1e-10);
        }
    }
}

#[test]
fn planner_start_target_is_zero_length() {
    let r = TurnRadius::new(0.25).unwrap();
    let plan = planner::plan(&Configuration::identity(), &Vector3::x(), r).unwrap();
    assert_eq!(plan.optimal().length, 0.0);
    assert_eq!(plan.optimal().path_type, PathType::Trivial);
}

#[test]
fn sampled_waypoints_stay_on_the_sphere() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let r = TurnRadius::new(rng.random_range(0.1..=0.5)).unwrap();
        let target = random_unit(&mut rng);
        let plan = planner::plan(&Configuration::identity(), &target, r).unwrap();
        let samples =
            sample_path(&Configuration::identity(), &plan.optimal().segments, r, 64).unwrap();
        assert_eq!(samples.len(), 64);
        for (_, cfg) in &samples {
            assert!((cfg.position().norm() - 1.0).abs() <= 1e-9);
        }
        let last = samples.last().unwrap().1.position();
        assert!((last - target).norm() <= 1e-8);
    }
}

#[test]
fn integrator_matches_closed_form_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..10 {
        let r = TurnRadius::new(rng.random_range(0.1..=FRAC_1_SQRT_2)).unwrap();
        let phi: f64 = rng.random_range(0.0..TAU);
        let ty = SegmentType::ALL[rng.random_range(0..3usize)];
        let closed = segment_rotation(ty, r, phi).unwrap();
        let stepped = integrate_frame(
            &Configuration::identity(),
            ty.geodesic_curvature(r),
            ty.radius(r) * phi,
            1e-4,
        )
        .unwrap();
        assert!((closed - stepped.matrix()).abs().max() <= 1e-8);
    }
}

#[test]
fn oracle_certifies_the_reference_instance_at_default_grid() {
    let r = TurnRadius::new(0.4).unwrap();
    let target = Vector3::new(0.6942, 0.5498, 0.4646).normalize();
    let plan = planner::plan(&Configuration::identity(), &target, r).unwrap();
    let result =
        oracle::search(&Configuration::identity(), &target, r, &GridSpec::default()).unwrap();
    let best = result.best.unwrap();
    let gap = plan.optimal().length - best.length;
    assert!(
        gap <= result.resolution_bound,
        "gap {gap} vs bound {}",
        result.resolution_bound
    );
    assert!(best.residual <= result.chord_tolerance);
}

#[test]
fn oracle_respects_geodesic_lower_bound_and_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let grid = GridSpec {
        angle_step: TAU / 400.0,
        ..GridSpec::default()
    };
    for _ in 0..10 {
        let r = TurnRadius::new(rng.random_range(0.1..=0.5)).unwrap();
        let target = random_unit(&mut rng);
        let result = oracle::search(&Configuration::identity(), &target, r, &grid).unwrap();
        let best = result.best.expect("three-segment words cover the sphere");
        let geodesic = target.x.clamp(-1.0, 1.0).acos();
        assert!(best.length >= geodesic - 2.0 * result.chord_tolerance);
        assert!(best.length <= best.grid_length + 1e-15);
        assert!(best.residual <= result.chord_tolerance);
        for (&ty, &angle) in best.word.iter().zip(&best.angles) {
            assert!((0.0..TAU).contains(&angle), "{ty}: {angle}");
        }
    }
}
