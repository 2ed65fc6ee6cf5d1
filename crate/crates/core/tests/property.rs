//! Property tests over randomized moment data and economics.

use proptest::prelude::*;

use robust_newsvendor::knapsack::{epigraph_pieces, knapsack_allocate};
use robust_newsvendor::lp::{pwl_epigraph, solve_lp, LpStatus};
use robust_newsvendor::moments::{mean_range_two_point, worst_case_three_point};
use robust_newsvendor::single_item::{pwl_pieces, worst_case_cost};
use robust_newsvendor::{Instance, Item, ItemEconomics, MomentSpec};

fn arb_spec() -> impl Strategy<Value = MomentSpec> {
    (0.0..30.0f64, 0.5..80.0f64, 0.05..0.95f64, 0.0..1.0f64).prop_map(
        |(a, width, mean_frac, mad_frac)| {
            let b = a + width;
            let mu = a + width * mean_frac;
            let probe = MomentSpec::new(a, mu, b, 0.0);
            MomentSpec::new(a, mu, b, mad_frac * probe.mad_upper_bound() * 0.999)
        },
    )
}

fn arb_econ() -> impl Strategy<Value = ItemEconomics> {
    (0.2..3.0f64, 0.05..5.0f64, 0.05..1.5f64)
        .prop_map(|(c, m, d)| ItemEconomics::new(c, m, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// The worst-case three-point distribution reproduces the mean and MAD
    /// it was built from, and stays within the support.
    #[test]
    fn worst_case_matches_moments(spec in arb_spec()) {
        let dist = worst_case_three_point(&spec).unwrap();
        let scale = spec.mu.abs().max(1.0);
        prop_assert!((dist.mean() - spec.mu).abs() < 1e-11 * scale);
        prop_assert!((dist.mad() - spec.mad).abs() < 1e-11 * scale);
        prop_assert!(dist.min() >= spec.a - 1e-9 && dist.max() <= spec.b + 1e-9);
        let total: f64 = dist.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    /// The mean-range two-point distribution preserves the mean.
    #[test]
    fn mean_range_matches_mean(spec in arb_spec()) {
        let dist = mean_range_two_point(&spec).unwrap();
        prop_assert!((dist.mean() - spec.mu).abs() < 1e-11 * spec.mu.abs().max(1.0));
    }

    /// The pointwise maximum of the three pieces equals the worst-case cost
    /// everywhere on the support.
    #[test]
    fn pwl_max_equals_cost(spec in arb_spec(), econ in arb_econ(), frac in 0.0..1.0f64) {
        let q = spec.b * frac;
        let pieces = pwl_pieces(&econ, &spec).unwrap();
        let direct = worst_case_cost(&econ, &spec, q).unwrap();
        let scale = 1.0 + direct.abs();
        prop_assert!((pieces.value(q) - direct).abs() < 1e-9 * scale);
    }

    /// Greedy allocation and the epigraph LP agree on small instances.
    #[test]
    fn greedy_equals_lp(
        specs in proptest::collection::vec(arb_spec(), 1..5),
        econs in proptest::collection::vec(arb_econ(), 5),
        budget_frac in 0.0..1.1f64,
    ) {
        let items: Vec<Item> = specs
            .iter()
            .zip(&econs)
            .map(|(spec, econ)| Item::new(*econ, *spec))
            .collect();
        let full: f64 = items.iter().map(|it| it.econ.unit_cost * it.spec.b).sum();
        let budget = full * budget_frac;
        let greedy = knapsack_allocate(&Instance::new(items.clone(), budget).unwrap()).unwrap();
        let pieces: Vec<Vec<(f64, f64)>> =
            items.iter().map(|it| epigraph_pieces(it).unwrap()).collect();
        let costs: Vec<f64> = items.iter().map(|it| it.econ.unit_cost).collect();
        let sol = solve_lp(&pwl_epigraph(&pieces, &[(costs, budget)]).unwrap()).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        prop_assert!(
            (sol.objective - greedy.objective).abs() < 1e-8 * (1.0 + greedy.objective.abs()),
            "greedy {} vs LP {}", greedy.objective, sol.objective
        );
    }
}
