use egt_roots::sampling::{CoefficientDistribution, SamplingScheme, SeededStream};
use egt_roots::statistics::{
    expected_count_closed_form, merge, run_campaign, CampaignConfig, EnsembleDescriptor,
    MonteCarloSummary,
};
use proptest::prelude::*;

fn desc() -> EnsembleDescriptor {
    EnsembleDescriptor::new(2, 6, CoefficientDistribution::Gaussian, SamplingScheme::AggregateA, false)
}

fn summary(counts: &[usize], degenerate: u64, seed: u64) -> MonteCarloSummary {
    let mut s = MonteCarloSummary::empty(desc(), seed);
    for &c in counts {
        s.record(c);
    }
    for _ in 0..degenerate {
        s.record_degenerate();
    }
    s
}

fn counts() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..6usize, 0..60)
}

proptest! {
    #[test]
    fn merge_is_associative_and_commutative(a in counts(), b in counts(), c in counts(), g in 0..3u64) {
        let (a, b, c) = (summary(&a, g, 1), summary(&b, 0, 2), summary(&c, 1, 3));
        let left = merge(&merge(&a, &b).unwrap(), &c).unwrap();
        let right = merge(&a, &merge(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(merge(&a, &b).unwrap(), merge(&b, &a).unwrap());
    }

    #[test]
    fn merge_with_empty_is_identity(a in counts()) {
        let s = summary(&a, 0, 4);
        prop_assert_eq!(merge(&s, &MonteCarloSummary::empty(desc(), 4)).unwrap(), s);
    }

    #[test]
    fn pooled_mean_is_weighted_mean(a in counts(), b in counts()) {
        prop_assume!(!a.is_empty() && !b.is_empty());
        let (sa, sb) = (summary(&a, 0, 1), summary(&b, 0, 2));
        let m = merge(&sa, &sb).unwrap().mean().unwrap();
        let w = (sa.mean().unwrap() * a.len() as f64 + sb.mean().unwrap() * b.len() as f64)
            / (a.len() + b.len()) as f64;
        prop_assert!((m - w).abs() < 1e-12);
    }

    #[test]
    fn empirical_probabilities_sum_to_one(a in counts()) {
        prop_assume!(!a.is_empty());
        let s = summary(&a, 0, 1);
        let total: u64 = s.histogram().iter().sum();
        prop_assert_eq!(total, s.samples());
        prop_assert!((s.pm().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip(a in counts(), g in 0..3u64) {
        let s = summary(&a, g, 9);
        prop_assert_eq!(MonteCarloSummary::from_json(&s.to_json().unwrap()).unwrap(), s);
    }

    #[test]
    fn substreams_are_deterministic(seed in any::<u64>(), index in any::<u64>(), retry in 0..64u64) {
        let a = SeededStream::new(seed, index).with_retry(retry);
        let b = SeededStream::new(seed, index).with_retry(retry);
        prop_assert_eq!(a.key(), b.key());
        if retry > 0 {
            prop_assert_ne!(a.key(), SeededStream::new(seed, index).key());
        }
    }
}

#[test]
fn split_campaigns_merge_like_one_seed_set() {
    let c = |seed| CampaignConfig { descriptor: desc(), samples: 700, seed, workers: 2 };
    let a = run_campaign(&c(1)).unwrap();
    let b = run_campaign(&c(2)).unwrap();
    let m = merge(&a, &b).unwrap();
    assert_eq!(m.samples(), 1400);
    assert_eq!(m.seeds(), &[1, 2]);
    assert_eq!(m.sum(), a.sum() + b.sum());
}

#[test]
fn small_campaign_tracks_the_closed_form() {
    for (n, d) in [(2, 3), (2, 7), (3, 2), (4, 2)] {
        let e = EnsembleDescriptor::new(n, d, CoefficientDistribution::Gaussian, SamplingScheme::AggregateA, false);
        let s = run_campaign(&CampaignConfig { descriptor: e, samples: 20_000, seed: 77, workers: 1 }).unwrap();
        let r = expected_count_closed_form(d, n);
        let (m, se) = (s.mean().unwrap(), s.standard_error().unwrap());
        assert!((m - r).abs() <= 4.0 * se, "n={n} d={d}: {m} ± {se} vs {r}");
    }
}
