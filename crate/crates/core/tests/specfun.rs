use fso_core::specfun::{bessel_k, erf, normal_pdf, q_function, q_inverse};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn bessel_k_matches_reference_grid() {
    // Reference values from 30-digit arithmetic.
    let grid = [
        (0.0, 0.1, 2.4270690247020165578),
        (0.5, 1.0, 0.46106850444789455844),
        (1.5, 0.5, 3.2251428104997607162),
        (0.75, 3.0, 0.037696423405926790862),
        (1.5, 10.0, 1.9792825903075697569e-5),
        (10.3, 5.0, 14.931016168775526506),
        (0.1, 30.0, 2.1328272173424445037e-14),
        (2.5, 0.01, 375987.97477979480781),
        (20.0, 15.0, 0.012141257729731150185),
    ];
    for (nu, x, want) in grid {
        let got = bessel_k(nu, x).unwrap();
        assert!(rel(got, want) < 1e-12, "K_{nu}({x}) = {got}, want {want}");
    }
}

#[test]
fn bessel_k_is_even_in_order() {
    for x in [0.3, 2.0, 7.5] {
        for nu in [0.25, 1.7, 3.0] {
            assert!(rel(bessel_k(-nu, x).unwrap(), bessel_k(nu, x).unwrap()) < 1e-14);
        }
    }
}

#[test]
fn q_at_zero_is_exactly_half() {
    assert_eq!(q_function(0.0).get(), 0.5);
}

proptest! {
    #[test]
    fn q_symmetry(x in -8.0f64..8.0) {
        let s = q_function(x).get() + q_function(-x).get();
        prop_assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn q_inverse_round_trip(x in -6.0f64..6.0) {
        let q = q_function(x).get();
        let back = q_inverse(q).unwrap();
        // Near Q = 1 one ulp of Q spans more than 1e-9 in x; allow that much.
        let ulp = f64::from_bits(q.to_bits() + 1) - q;
        let limit = 1e-9 + ulp / normal_pdf(x);
        prop_assert!((back - x).abs() < limit, "x = {x}, back = {back}");
    }

    #[test]
    fn q_is_decreasing(x in -8.0f64..8.0, dx in 1e-3f64..1.0) {
        prop_assert!(q_function(x + dx).get() < q_function(x).get());
    }

    #[test]
    fn erf_is_odd(x in -6.0f64..6.0) {
        prop_assert!((erf(x) + erf(-x)).abs() < 1e-14);
    }
}
