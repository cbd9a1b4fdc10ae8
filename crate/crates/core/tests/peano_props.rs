use mvlab::peano::{
    analytic_time, combined_eval, integrate_scalar, l1_bound_check, lipschitz_transfer_check, partial_combined_coord,
    peano_failure_witness, L1Coefficients, ScalarCauchyProblem, TruncatedPoint, WitnessConfig,
};
use mvlab::{Error, PartitionScheme};
use proptest::prelude::*;

fn scheme() -> impl Strategy<Value = PartitionScheme> {
    prop_oneof![Just(PartitionScheme::Dyadic), Just(PartitionScheme::Cantor)]
}

fn coefficients() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 1..12)
}

/// A point of `c_0` with shrinking coordinates.
fn point() -> impl Strategy<Value = TruncatedPoint> {
    prop::collection::vec(-5.0f64..5.0, 0..80)
        .prop_map(|v| TruncatedPoint::new(v.iter().enumerate().map(|(k, x)| x / (k as f64 + 1.0)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn combined_field_equals_its_termwise_sum(
        a in coefficients(), s in scheme(), x in point(), n in 1u64..400,
    ) {
        let a = L1Coefficients::finite(&a).unwrap();
        let m = a.sequence().support_end().unwrap().max(1);
        let direct = partial_combined_coord(&a, s, m, n, &x).unwrap();
        prop_assert_eq!(combined_eval(&a, s, n, &x).unwrap(), direct);
    }

    #[test]
    fn l1_estimates_hold(
        a in coefficients(), s in scheme(), x in point(), y in point(), m in 1u64..14,
    ) {
        let a = L1Coefficients::finite(&a).unwrap();
        let bound = l1_bound_check(&a, s, &x, m, 300, 1e-12).unwrap();
        prop_assert!(bound.holds && bound.slack() >= -1e-12, "{:?}", bound);
        let lip = lipschitz_transfer_check(&a, s, &x, &y, m, 300, 1e-12).unwrap();
        prop_assert!(lip.holds && lip.slack() >= -1e-12, "{:?}", lip);
    }

    #[test]
    fn rk4_agrees_with_inverted_antiderivative(
        lambda in 0.1f64..3.0, gamma in 1e-3f64..2.0, y0 in -4.0f64..4.0, horizon in 0.1f64..2.0,
    ) {
        let p = ScalarCauchyProblem::new(lambda, gamma, 0.0, y0).unwrap();
        let traj = integrate_scalar(&p, 1e-3, horizon).unwrap();
        let (t, u) = traj.last().unwrap();
        let oracle = analytic_time(&p, u).unwrap();
        prop_assert!((oracle - t).abs() <= 1e-6 * t, "t={} oracle={}", t, oracle);
    }

    #[test]
    fn trajectories_respect_the_quadratic_lower_bound(
        lambda in 0.2f64..3.0, gamma in 1e-3f64..1.0, y0 in 0.0f64..2.0,
    ) {
        let p = ScalarCauchyProblem::new(lambda, gamma, 0.0, y0).unwrap();
        let traj = integrate_scalar(&p, 1e-3, 3.0).unwrap();
        for (t, u) in traj.iter() {
            prop_assert!(u >= p.lower_bound(t) - 1e-9);
        }
    }
}

#[test]
fn witness_bound_is_uniform_across_the_block() {
    let positions: Vec<u64> = (1..=64).collect();
    for s in PartitionScheme::ALL {
        for coeff in [1.0, -1.0, 0.5] {
            let a = L1Coefficients::finite(&[0.0, 0.0, coeff]).unwrap();
            let cfg = WitnessConfig::default();
            let w = peano_failure_witness(&a, s, &positions, &cfg).unwrap();
            assert_eq!(w.block, 3);
            assert!(w.holds(), "{s} {coeff}");
            assert_eq!(w.time_reversed, coeff < 0.0);
            assert!(w.samples.iter().all(|x| x.value >= w.lower_bound - cfg.tolerance));
        }
    }
    let zero = L1Coefficients::finite(&[0.0]).unwrap();
    assert_eq!(
        peano_failure_witness(&zero, PartitionScheme::Dyadic, &positions, &WitnessConfig::default()),
        Err(Error::ZeroField)
    );
}
