use egt_roots::game_model::{
    aggregate_coefficients, fitness, fitness_aggregated, orthant_to_simplex, replicator_residual,
    simplex_to_orthant, to_univariate, PayoffTensor,
};
use proptest::prelude::*;

fn game(n: usize, d: usize) -> impl Strategy<Value = (PayoffTensor, Vec<f64>)> {
    let len = n * n.pow(d as u32 - 1);
    (
        prop::collection::vec(-5.0..5.0f64, len),
        prop::collection::vec(0.05..1.0f64, n),
    )
        .prop_map(move |(entries, w)| {
            let s: f64 = w.iter().sum();
            (PayoffTensor::new(n, d, entries).unwrap(), w.iter().map(|v| v / s).collect())
        })
}

fn shapes() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![(2..=3usize, 2..=5usize), Just((4, 3)), Just((5, 2))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn aggregated_fitness_matches_direct_sum((tensor, x) in shapes().prop_flat_map(|(n, d)| game(n, d))) {
        let a = fitness(&tensor, &x).unwrap();
        let b = fitness_aggregated(&tensor, &x).unwrap();
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() <= 1e-10 * (1.0 + u.abs()), "{u} vs {v}");
        }
    }

    #[test]
    fn residual_is_fitness_difference((tensor, x) in shapes().prop_flat_map(|(n, d)| game(n, d))) {
        let f = fitness(&tensor, &x).unwrap();
        let r = replicator_residual(&tensor.beta(), &x).unwrap();
        let n = f.len();
        for i in 0..n - 1 {
            prop_assert!((r[i] - (f[i] - f[n - 1])).abs() <= 1e-10 * (1.0 + f[i].abs() + f[n - 1].abs()));
        }
    }

    #[test]
    fn orthant_simplex_round_trip(y in prop::collection::vec(1e-6..1e6f64, 1..6)) {
        let x = orthant_to_simplex(&y).unwrap();
        prop_assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let back = simplex_to_orthant(&x).unwrap();
        for (a, b) in y.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn univariate_form_vanishes_with_residual((tensor, x) in game(2, 5)) {
        // p(y) (1 + y)^-(d-1) is the residual at x = (y, 1) / (1 + y)
        let p = to_univariate(&aggregate_coefficients(&tensor.beta()).unwrap()).unwrap();
        let y = x[0] / x[1];
        let r = replicator_residual(&tensor.beta(), &x).unwrap()[0];
        let scaled = p.eval(y) / (1.0 + y).powi(4);
        prop_assert!((r - scaled).abs() <= 1e-10 * (1.0 + r.abs()));
    }
}

#[test]
fn out_of_domain_points_are_rejected() {
    assert!(orthant_to_simplex(&[1.0, 0.0]).is_err());
    assert!(orthant_to_simplex(&[-1.0]).is_err());
    assert!(simplex_to_orthant(&[0.5, 0.5, 0.0]).is_err());
}
