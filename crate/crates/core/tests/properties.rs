use dirlab_core::arrowspec::{char_poly_residual, char_poly_scale, check_localization, eigen_oracle, trace_identity_check, ArrowMatrix, Threshold};
use dirlab_core::symcone::{elementary_symmetric, ConeSpec, OperatorSpec};
use proptest::prelude::*;

fn arrow() -> impl Strategy<Value = ArrowMatrix> {
    (2usize..7).prop_flat_map(|n| {
        (proptest::collection::vec(-2.0f64..2.0, n - 1), proptest::collection::vec(-1.0f64..1.0, n - 1), -5.0f64..5.0)
            .prop_map(|(d, a, corner)| ArrowMatrix::real(&d, &a, corner).unwrap())
    })
}

fn operators(n: usize) -> Vec<OperatorSpec> {
    let mut ops = vec![OperatorSpec::log_ma(n).unwrap()];
    for k in 1..=n {
        ops.push(OperatorSpec::sigma_k_root(k, n).unwrap());
        for l in 0..k {
            ops.push(OperatorSpec::hessian_quotient(k, l, n).unwrap());
        }
    }
    ops
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn oracle_spectrum_satisfies_trace_and_characteristic_polynomial(m in arrow()) {
        prop_assert!(trace_identity_check(&m).unwrap() < 1e-10);
        for lambda in eigen_oracle(&m).unwrap() {
            prop_assert!(char_poly_residual(&m, lambda) <= 1e-9 * char_poly_scale(&m, lambda).max(1.0));
        }
    }

    #[test]
    fn localization_holds_once_corner_meets_main_threshold(m in arrow(), eps in 0.05f64..2.0, extra in 0.0f64..10.0) {
        let report = check_localization(&m, eps, Threshold::Main).unwrap();
        let lifted = m.with_corner(report.threshold + extra);
        let report = check_localization(&lifted, eps, Threshold::Main).unwrap();
        prop_assert!(report.hypotheses_hold());
        prop_assert!(report.satisfied, "{report:?}");
    }

    #[test]
    fn garding_cones_are_nested(lambda in proptest::collection::vec(-1.0f64..3.0, 2..6)) {
        let n = lambda.len();
        let members: Vec<bool> = (1..=n).map(|k| ConeSpec::garding(k, n).unwrap().contains(&lambda).unwrap()).collect();
        for w in members.windows(2) {
            prop_assert!(w[0] || !w[1], "Γ_(k+1) member outside Γ_k: {lambda:?}");
        }
        prop_assert_eq!(members[n - 1], lambda.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn maclaurin_inequality_on_positive_vectors(lambda in proptest::collection::vec(0.01f64..5.0, 2..6)) {
        let n = lambda.len();
        let binom = |k: usize| (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
        let means: Vec<f64> = (1..=n)
            .map(|k| (elementary_symmetric(&lambda, k).unwrap() / binom(k)).powf(1.0 / k as f64))
            .collect();
        for w in means.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn operators_increase_along_the_positive_orthant(
        lambda in proptest::collection::vec(0.1f64..3.0, 2..5),
        step in proptest::collection::vec(0.0f64..1.0, 4),
    ) {
        let n = lambda.len();
        let mu: Vec<f64> = lambda.iter().zip(&step).map(|(l, s)| l + s + 1e-3).collect();
        for op in operators(n) {
            prop_assert!(op.eval(&mu).unwrap() >= op.eval(&lambda).unwrap(), "{op:?}");
            prop_assert!(op.grad(&lambda).unwrap().iter().all(|&g| g >= 0.0), "{op:?}");
        }
    }

    #[test]
    fn operators_are_symmetric(lambda in proptest::collection::vec(0.1f64..3.0, 3), shift in 0usize..3) {
        let mut rotated = lambda.clone();
        rotated.rotate_left(shift);
        for op in operators(3) {
            let (a, b) = (op.eval(&lambda).unwrap(), op.eval(&rotated).unwrap());
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{op:?}");
        }
    }
}
