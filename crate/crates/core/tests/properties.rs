use proptest::prelude::*;

use prepay_core::closed_form::solve_boundary;
use prepay_core::model::{balance, derive_constants, CirParams, ContractParams};
use prepay_core::par::{map_range, Execution};
use prepay_core::Error;

fn cir_params() -> impl Strategy<Value = CirParams> {
    (0.05f64..1.0, 0.01f64..0.15, 0.03f64..0.3).prop_map(|(k, theta, sigma)| CirParams::new(k, theta, sigma).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derived_constants_hold_invariants(cir in cir_params()) {
        let d = derive_constants(&cir).unwrap();
        prop_assert!(d.check_invariants().is_ok());
        // λ solves the indicial equation σ²λ²/2 − kλ − 1 = 0.
        let s2 = cir.sigma * cir.sigma;
        let q = 0.5 * s2 * d.lambda * d.lambda - cir.k * d.lambda - 1.0;
        prop_assert!(q.abs() <= 1e-12 * (1.0 + cir.k * d.lambda.abs()));
    }

    #[test]
    fn balance_is_increasing_and_bounded(
        c in 0.01f64..0.2,
        m in 1.0f64..1e4,
        t1 in 0.0f64..100.0,
        dt in 1e-3f64..50.0,
    ) {
        let contract = ContractParams::new(c, m, Some(t1 + dt)).unwrap();
        let a = balance(&contract, t1).unwrap();
        let b = balance(&contract, t1 + dt).unwrap();
        prop_assert!(0.0 <= a && a < b && b < m / c);
    }

    #[test]
    fn map_range_is_mode_independent(n in 0usize..500, salt in any::<u64>()) {
        let f = |i: usize| (i as u64).wrapping_mul(salt).rotate_left(17);
        prop_assert_eq!(map_range(Execution::Sequential, n, f), map_range(Execution::Parallel, n, f));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Wherever a boundary exists, the value satisfies pasting and stays in (0, 1], decreasing.
    #[test]
    fn solved_value_is_a_decreasing_fraction(cir in cir_params(), c in 0.02f64..0.12) {
        let contract = ContractParams::perpetual(c).unwrap();
        let sol = match solve_boundary(&cir, &contract, 1e-10) {
            Ok(sol) => sol,
            Err(Error::NoBracket { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(sol.x_star > 0.0);
        prop_assert!((sol.value(sol.x_star).unwrap() - 1.0).abs() <= 1e-8);
        let hi = 10.0 * cir.theta.max(c).max(sol.x_star);
        let mut prev = 1.0 + 1e-12;
        for i in 1..=40 {
            let x = sol.x_star + (hi - sol.x_star) * i as f64 / 40.0;
            let v = sol.value(x).unwrap();
            prop_assert!(v > 0.0 && v < prev, "x = {}, v = {}, prev = {}", x, v, prev);
            prev = v;
        }
    }
}
