use std::f64::consts::{PI, SQRT_2};

use ctoa::analytic::{characteristic_fn, CharacteristicCase};
use ctoa::specfun::{bessel_j, find_roots, BesselOrder, DEFAULT_SCAN_STEP, SERIES_CROSSOVER};
use proptest::prelude::*;

use BesselOrder::*;

fn j(o: BesselOrder, x: f64) -> f64 {
    bessel_j(o, x).unwrap()
}

// Independent values computed with mpmath at 30 digits.
#[test]
fn matches_high_precision_references() {
    let cases = [
        (Quarter, 1.0, 0.752_231_333_340_790_1),
        (MinusQuarter, 2.5, -0.240_967_863_415_769_5),
        (ThreeQuarters, 7.0, 0.102_499_306_463_590_5),
        (MinusThreeQuarters, 45.0, 0.018_588_880_656_937_4),
        (FiveQuarters, 12.0, -0.229_215_643_427_038_0),
    ];
    for (o, x, v) in cases {
        let got = j(o, x);
        assert!((got - v).abs() < 1e-13, "J_{}({x}) = {got}, want {v}", o.nu());
    }
}

#[test]
fn quarter_order_vanishes_like_a_quarter_power() {
    let a = j(Quarter, 1e-8);
    let b = j(Quarter, 1e-4);
    assert!(a.abs() < 1e-2 && a > 0.0);
    // ratio of x^{1/4} between the two points is 10
    assert!(((b / a) - 10.0).abs() < 1e-6);
}

#[test]
fn minus_quarter_roots_are_spaced_by_about_pi() {
    let roots = find_roots(|x| j(MinusQuarter, x), 40.0, DEFAULT_SCAN_STEP).unwrap();
    assert!((roots.roots[0] - 2.0063).abs() < 1e-4);
    assert!(roots.max_residual() < 1e-10);
    for w in roots.roots.windows(2) {
        assert!(w[1] > w[0]);
        assert!((w[1] - w[0] - PI).abs() < 0.05, "spacing {}", w[1] - w[0]);
    }
    // first root agrees with the tabulated eigenvalue 0.12460751 through r = 1/(4τ)
    assert!((1.0 / (4.0 * roots.roots[0]) - 0.124_607_51).abs() < 5e-9);
}

#[test]
fn periodic_even_first_root_matches_its_eigenvalue() {
    let roots = find_roots(
        |x| characteristic_fn(CharacteristicCase::PeriodicEven, x).unwrap(),
        40.0,
        DEFAULT_SCAN_STEP,
    )
    .unwrap();
    assert!((roots.roots[0] - 2.2434).abs() < 1e-4);
    assert!((1.0 / (4.0 * roots.roots[0]) - 0.111_438_23).abs() < 5e-9);
    assert!(roots.max_residual() < 1e-10);
}

#[test]
fn linear_root() {
    let r = find_roots(|x| x - 5.0, 10.0, 0.3).unwrap();
    assert_eq!(r.len(), 1);
    assert!((r.roots[0] - 5.0).abs() < 1e-12);
}

#[test]
fn expansions_agree_across_the_crossover() {
    for o in BesselOrder::ALL {
        // The slope, estimated one-sidedly within each expansion, accounts
        // for the genuine change of J over the 2h gap.
        let (x, h, d) = (SERIES_CROSSOVER, 1e-9, 1e-3);
        let slope = 0.5 * ((j(o, x - h) - j(o, x - d - h)) + (j(o, x + d + h) - j(o, x + h))) / d;
        let jump = j(o, x + h) - j(o, x - h) - 2.0 * h * slope;
        assert!(jump.abs() < 1e-14, "nu = {}: {jump:e}", o.nu());
    }
}

proptest! {
    // J_{-3/4} + J_{5/4} = J_{1/4} / (2x)
    #[test]
    fn three_term_recurrence(x in 0.05f64..120.0) {
        let lhs = j(MinusThreeQuarters, x) + j(FiveQuarters, x);
        let rhs = j(Quarter, x) / (2.0 * x);
        prop_assert!((lhs - rhs).abs() < 1e-13 * (1.0 + rhs.abs()), "x = {}: {} vs {}", x, lhs, rhs);
    }

    // J_{1/4} J_{3/4} + J_{-1/4} J_{-3/4} = √2 / (πx)
    #[test]
    fn cross_product_identity(x in 0.05f64..120.0) {
        let lhs = j(Quarter, x) * j(ThreeQuarters, x) + j(MinusQuarter, x) * j(MinusThreeQuarters, x);
        let rhs = SQRT_2 / (PI * x);
        prop_assert!((lhs - rhs).abs() < 1e-13 * (1.0 + rhs), "x = {}", x);
    }

    #[test]
    fn roots_are_increasing_positive_and_accurate(shift in 0.0f64..3.0, x_max in 5.0f64..60.0) {
        let roots = find_roots(|x| (x + shift).sin(), x_max, DEFAULT_SCAN_STEP).unwrap();
        prop_assert!(roots.roots.iter().all(|&r| r > 0.0 && r <= x_max));
        prop_assert!(roots.roots.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(roots.max_residual() < 1e-10);
    }
}
