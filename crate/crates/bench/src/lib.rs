//! Shared instance generators for the benchmark suite.

use robust_newsvendor::rng::SplitMix64;
use robust_newsvendor::{Item, ItemEconomics, MomentSpec};

/// Deterministic random instance with feasible moments.
pub fn random_items(seed: u64, n: usize) -> Vec<Item> {
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|_| {
            let a = rng.uniform(0.0, 20.0);
            let b = a + rng.uniform(0.5, 80.0);
            let mu = rng.uniform(a + 0.05 * (b - a), b - 0.05 * (b - a));
            let probe = MomentSpec::new(a, mu, b, 0.0);
            let mad = rng.uniform(0.0, probe.mad_upper_bound() * 0.99);
            Item::new(
                ItemEconomics::new(
                    rng.uniform(0.2, 3.0),
                    rng.uniform(0.05, 5.0),
                    rng.uniform(0.05, 1.5),
                )
                .unwrap(),
                MomentSpec::new(a, mu, b, mad),
            )
        })
        .collect()
}

/// A budget that binds roughly halfway through the ranked list.
pub fn half_budget(items: &[Item]) -> f64 {
    0.5 * items
        .iter()
        .map(|it| it.econ.unit_cost * it.spec.b)
        .sum::<f64>()
}
