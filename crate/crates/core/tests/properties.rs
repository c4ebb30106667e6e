//! Property tests for the structural invariants: exponent identities,
//! geometry, log arithmetic, intersection counting, and solver positivity.

use std::sync::Arc;

use proptest::prelude::*;

use hyperheat_core::solver::{evolve, intersection_count, SolverConfig};
use hyperheat_core::{
    build_grid, davies_log, gaussian1d_log, geodesic_distance, kernel_log, q_profile, Grading,
    KernelSpec, LogScalar, RadialField,
};

proptest! {
    /// -lambda1 t - (n-1)r/2 - r^2/4t == -(r+(n-1)t)^2/4t to machine
    /// precision.
    #[test]
    fn exponent_identity(n in 2u32..8, r in 0.0f64..200.0, t in 1e-3f64..200.0) {
        let spec = KernelSpec::new(n).unwrap();
        let c = (n - 1) as f64 * t;
        let lhs = -spec.lambda1() * t - 0.5 * (n - 1) as f64 * r - r * r / (4.0 * t);
        let rhs = -(r + c) * (r + c) / (4.0 * t);
        let scale = lhs.abs().max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    /// Distance symmetry in the two radii, endpoint reductions, and the
    /// collinear bounds |r - a| <= L <= r + a.
    #[test]
    fn geodesic_distance_properties(
        r in 0.0f64..80.0,
        a in 0.0f64..80.0,
        theta in 0.0f64..std::f64::consts::PI,
    ) {
        let l = geodesic_distance(r, a, theta).unwrap();
        let l_swapped = geodesic_distance(a, r, theta).unwrap();
        prop_assert!((l - l_swapped).abs() <= 1e-10 * (1.0 + l));
        prop_assert!(l >= (r - a).abs() - 1e-10);
        prop_assert!(l <= r + a + 1e-10);
        // monotone in the angle
        let l2 = geodesic_distance(r, a, (theta + 0.1).min(std::f64::consts::PI)).unwrap();
        prop_assert!(l2 >= l - 1e-10);
    }

    /// Log-domain arithmetic agrees with plain arithmetic where the latter
    /// is representable.
    #[test]
    fn logscalar_consistency(x in 1e-6f64..1e6, y in 1e-6f64..1e6) {
        let a = LogScalar::from_value(x);
        let b = LogScalar::from_value(y);
        prop_assert!(((a * b).value() - x * y).abs() <= 1e-12 * x * y);
        prop_assert!(((a + b).value() - (x + y)).abs() <= 1e-12 * (x + y));
        prop_assert!((a.ratio_to(b) - x / y).abs() <= 1e-12 * (x / y));
        let d = a.sub_positive(b).value();
        prop_assert!((d - (x - y).max(0.0)).abs() <= 1e-10 * (1.0 + x));
    }

    /// The kernel is strictly decreasing in r at fixed t (odd dimensions).
    #[test]
    fn kernel_decreasing_in_radius(
        idx in 0usize..2,
        r in 0.0f64..60.0,
        dr in 1e-3f64..5.0,
        t in 0.05f64..50.0,
    ) {
        let n = [3u32, 5][idx];
        let spec = KernelSpec::new(n).unwrap();
        let v1 = kernel_log(&spec, r, t).unwrap().log_mag();
        let v2 = kernel_log(&spec, r + dr, t).unwrap().log_mag();
        prop_assert!(v2 < v1);
    }

    /// Davies profile stays positive and finite over a wide window.
    #[test]
    fn davies_profile_finite(n in 2u32..8, r in 0.0f64..500.0, t in 1e-3f64..500.0) {
        let spec = KernelSpec::new(n).unwrap();
        let h = davies_log(&spec, r, t).unwrap();
        prop_assert!(h.log_mag().is_finite());
    }

    /// The limit profile is nonincreasing in r.
    #[test]
    fn q_profile_nonincreasing(r in 0.0f64..30.0, dr in 1e-3f64..5.0) {
        let spec = KernelSpec::new(3).unwrap();
        let q1 = q_profile(&spec, r).unwrap();
        let q2 = q_profile(&spec, r + dr).unwrap();
        prop_assert!(q2 <= q1 * (1.0 + 1e-13));
        prop_assert!(q2 > 0.0);
    }

    /// 1D Gaussian log values agree with direct evaluation in the safe
    /// range.
    #[test]
    fn gaussian_log_matches_direct(x in -20.0f64..20.0, t in 0.01f64..100.0) {
        let v = gaussian1d_log(x, t).unwrap().value();
        let direct = (4.0 * std::f64::consts::PI * t).powf(-0.5) * (-x * x / (4.0 * t)).exp();
        prop_assert!((v - direct).abs() <= 1e-12 * direct);
    }
}

/// Reference implementation: count sign alternations of the compressed
/// nonzero sign sequence.
fn naive_crossings(d: &[f64]) -> usize {
    let signs: Vec<i8> = d
        .iter()
        .filter_map(|&x| {
            if x > 0.0 {
                Some(1)
            } else if x < 0.0 {
                Some(-1)
            } else {
                None
            }
        })
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn intersection_count_matches_reference(values in prop::collection::vec(-5i8..=5, 32..64)) {
        let grid = Arc::new(build_grid(3, 10.0, values.len(), Grading::Uniform).unwrap());
        let u = RadialField::new(
            Arc::clone(&grid),
            values.iter().map(|&x| x as f64 / 5.0).collect(),
            0.0,
        )
        .unwrap();
        let zero = RadialField::new(Arc::clone(&grid), vec![0.0; values.len()], 0.0).unwrap();
        let counted = intersection_count(&u, &zero).unwrap();
        let expected = naive_crossings(u.values());
        prop_assert_eq!(counted, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Nonnegative data stays nonnegative (within 1e-12 of the initial sup)
    /// and conserves its cell-account mass, including through rough data.
    #[test]
    fn solver_positivity_and_conservation(
        height in 0.2f64..2.0,
        radius in 0.3f64..1.5,
        sharp in prop::bool::ANY,
        t_total in 0.2f64..1.0,
    ) {
        let grid = Arc::new(build_grid(3, 16.0, 800, Grading::Uniform).unwrap());
        let u0 = RadialField::from_fn(Arc::clone(&grid), 0.0, |r| {
            if sharp {
                if r <= radius { height } else { 0.0 }
            } else {
                height * (-(r / radius) * (r / radius)).exp()
            }
        })
        .unwrap();
        let out = evolve(&u0, t_total, &SolverConfig::default(), None).unwrap();
        let floor = -1e-12 * u0.sup_norm();
        let min = out.field.values().iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!(min >= floor, "undershoot {} below {}", min, floor);
        prop_assert!(out.mass_drift <= 1e-6 * u0.mass().max(1e-12));
    }
}
