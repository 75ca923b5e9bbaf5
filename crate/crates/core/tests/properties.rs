//! Property tests for the scalar kernel layer.

use nulfrac_core::{FracOrder, LatticeSpec};
use proptest::prelude::*;

fn q_range() -> impl Strategy<Value = f64> {
    prop_oneof![0.15f64..0.95, 1.05f64..3.0]
}

proptest! {
    #[test]
    fn bracket_is_odd_and_normalized(q in q_range(), mu in -4.0f64..4.0) {
        let lat = LatticeSpec::q_quadratic(q, 1.0, 1.0, 0.0).unwrap();
        let b = lat.bracket(mu);
        let nb = lat.bracket(-mu);
        prop_assert!((b + nb).abs() <= 1e-12 * b.abs().max(1.0));
        prop_assert!((lat.bracket(1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gen_power_extends_the_product(
        q in 0.3f64..0.9,
        c1 in 0.4f64..1.5,
        c2 in 0.4f64..1.5,
        nu in -1.0f64..1.5,
        s in 3.0f64..8.0,
        n in 1usize..5,
    ) {
        let lat = LatticeSpec::q_quadratic(q, c1, c2, 0.1).unwrap();
        let z = s - n as f64;
        // the gamma-ratio branch agrees with the defining product wherever
        // both apply
        let prod = (0..n).fold(1.0, |acc, k| {
            acc * (lat.x_shifted(nu, s) - lat.x_shifted(nu, z - k as f64))
        });
        let ratio = lat.gen_power(nu, s, z, n as f64).unwrap();
        prop_assert!((ratio - prod).abs() <= 1e-9 * prod.abs().max(1e-6));
    }

    #[test]
    fn gen_power_recurrence_in_the_exponent(
        q in 0.3f64..0.9,
        mu in 0.1f64..2.5,
        nu in -1.0f64..1.5,
        steps in 2usize..8,
    ) {
        let lat = LatticeSpec::q_quadratic(q, 0.8, 1.2, 0.2).unwrap();
        let s = lat.c() / 2.0 + 9.0;
        let z = s - steps as f64;
        let lhs = lat.gen_power(nu, s, z, mu + 1.0).unwrap();
        let rhs = lat.gen_power(nu, s, z, mu).unwrap()
            * (lat.x_shifted(nu, s) - lat.x_shifted(nu, z - mu));
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1e-6));
    }

    #[test]
    fn modified_gamma_recurrence(q in 0.2f64..0.95, x in 0.05f64..6.0) {
        let lat = LatticeSpec::q_quadratic(q, 1.0, 1.3, 0.0).unwrap();
        let lhs = lat.modified_gamma(x + 1.0).unwrap();
        let rhs = lat.bracket(x) * lat.modified_gamma(x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1e-12));
    }

    #[test]
    fn frac_order_bracketing(alpha in 0.01f64..40.0) {
        let o = FracOrder::new(alpha).unwrap();
        let m = o.m() as f64;
        prop_assert!(m - 1.0 < alpha + 1e-9 && alpha <= m + 1e-9);
    }
}
