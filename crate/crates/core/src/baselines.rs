//! Ground-truth demand families, exact expected costs, reference policies,
//! and the budget-sweep experiment harness.
//!
//! The solver itself never sees full distributions; this module supplies
//! them for evaluation. Given a ground truth per item it computes the exact
//! expected cost of any ordering, the full-information constrained optimum
//! (a quantile rule with a bisected budget multiplier), the Gallego-Moon
//! mean-variance policy, and the Edmundson-Madansky mean-range policy, and
//! scores every policy by EVAI, the relative regret against the
//! full-information optimum.
//!
//! The bundled experiment presets pair nine demand cases (uniform, beta and
//! triangular families) with three mark-up regimes across 25 items, and
//! sweep the budget from zero to the unconstrained optimum spend.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knapsack::{
    evaluate_lower, evaluate_upper, greedy_allocate, lower_greedy_pieces, ranked_entries,
    validate_items, GreedyPieces, Instance, Item, OrderingPolicy, PolicyModel, RankedEntry,
};
use crate::moments::{mean_range_two_point, DiscreteDistribution, MomentSpec, NamedDistribution};
use crate::single_item::{pwl_pieces, scarf_cost, ItemEconomics};
use crate::special::beta_inc;

/// Environment variable capping sweep worker threads.
pub const THREADS_ENV: &str = "ROBUST_NV_THREADS";

/// A fully specified demand distribution used for scoring policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GroundTruth {
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Standard beta with shapes `(alpha, beta)` rescaled to `[lo, hi]`.
    ScaledBeta {
        alpha: f64,
        beta: f64,
        lo: f64,
        hi: f64,
    },
    Triangular {
        lo: f64,
        hi: f64,
        mode: f64,
    },
    Discrete(DiscreteDistribution),
}

impl GroundTruth {
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Uniform { lo, hi } => (*lo, *hi),
            Self::ScaledBeta { lo, hi, .. } => (*lo, *hi),
            Self::Triangular { lo, hi, .. } => (*lo, *hi),
            Self::Discrete(d) => (d.min(), d.max()),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Uniform { lo, hi } => (lo + hi) / 2.0,
            Self::ScaledBeta {
                alpha,
                beta,
                lo,
                hi,
            } => lo + (hi - lo) * alpha / (alpha + beta),
            Self::Triangular { lo, hi, mode } => (lo + hi + mode) / 3.0,
            Self::Discrete(d) => d.mean(),
        }
    }

    /// Mean absolute deviation, in closed form for the named families.
    pub fn mad(&self) -> f64 {
        match self {
            Self::Uniform { lo, hi } => NamedDistribution::Uniform { lo: *lo, hi: *hi }.mad(),
            Self::ScaledBeta {
                alpha,
                beta,
                lo,
                hi,
            } => NamedDistribution::Beta {
                alpha: *alpha,
                beta: *beta,
                lo: *lo,
                hi: *hi,
            }
            .mad(),
            Self::Triangular { lo, hi, mode } => NamedDistribution::Triangular {
                lo: *lo,
                hi: *hi,
                mode: *mode,
            }
            .mad(),
            Self::Discrete(d) => d.mad(),
        }
    }

    pub fn std_dev(&self) -> f64 {
        match *self {
            Self::Uniform { lo, hi } => (hi - lo) / 12f64.sqrt(),
            Self::ScaledBeta {
                alpha,
                beta,
                lo,
                hi,
            } => {
                let s = alpha + beta;
                (hi - lo) * (alpha * beta / (s * s * (s + 1.0))).sqrt()
            }
            Self::Triangular { lo, hi, mode } => {
                ((lo * lo + hi * hi + mode * mode - lo * hi - lo * mode - hi * mode) / 18.0).sqrt()
            }
            Self::Discrete(ref d) => d.variance().sqrt(),
        }
    }

    /// P(D <= x).
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Self::ScaledBeta {
                alpha,
                beta,
                lo,
                hi,
            } => {
                let t = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
                beta_inc(alpha, beta, t)
            }
            Self::Triangular { lo, hi, mode } => {
                if x <= lo {
                    0.0
                } else if x >= hi {
                    1.0
                } else if x <= mode {
                    (x - lo) * (x - lo) / ((hi - lo) * (mode - lo))
                } else {
                    1.0 - (hi - x) * (hi - x) / ((hi - lo) * (hi - mode))
                }
            }
            Self::Discrete(ref d) => d.cdf(x),
        }
    }

    /// Smallest `x` with `F(x) >= p`.
    pub fn inverse_cdf(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match *self {
            Self::Uniform { lo, hi } => lo + p * (hi - lo),
            Self::ScaledBeta {
                alpha,
                beta,
                lo,
                hi,
            } => {
                if p <= 0.0 {
                    return lo;
                }
                if p >= 1.0 {
                    return hi;
                }
                let (mut tl, mut th) = (0.0f64, 1.0f64);
                while th - tl > 1e-13 {
                    let tm = 0.5 * (tl + th);
                    if beta_inc(alpha, beta, tm) >= p {
                        th = tm;
                    } else {
                        tl = tm;
                    }
                }
                lo + (hi - lo) * 0.5 * (tl + th)
            }
            Self::Triangular { lo, hi, mode } => {
                let split = (mode - lo) / (hi - lo);
                if p <= split {
                    lo + (p * (hi - lo) * (mode - lo)).sqrt()
                } else {
                    hi - ((1.0 - p) * (hi - lo) * (hi - mode)).sqrt()
                }
            }
            Self::Discrete(ref d) => {
                let mut cum = 0.0;
                for (&x, &pr) in d.points().iter().zip(d.probs()) {
                    cum += pr;
                    if cum >= p - 1e-15 {
                        return x;
                    }
                }
                d.max()
            }
        }
    }

    /// `beta = P(D >= mean)`.
    pub fn prob_at_least_mean(&self) -> f64 {
        match self {
            Self::Discrete(d) => d.prob_at_least(d.mean()),
            _ => 1.0 - self.cdf(self.mean()),
        }
    }

    /// E(D - q)^+ in closed form (partial-expectation identity for the
    /// beta family).
    pub fn expected_shortfall(&self, q: f64) -> f64 {
        let (lo, hi) = self.support();
        if q >= hi {
            return 0.0;
        }
        if q <= lo {
            return self.mean() - q;
        }
        match *self {
            Self::Uniform { lo, hi } => (hi - q) * (hi - q) / (2.0 * (hi - lo)),
            Self::ScaledBeta {
                alpha,
                beta,
                lo,
                hi,
            } => {
                let t = (q - lo) / (hi - lo);
                let mean_std = alpha / (alpha + beta);
                // E(Y - t)^+ = mean (1 - I_t(a+1, b)) - t (1 - I_t(a, b))
                let tail_mean = mean_std * (1.0 - beta_inc(alpha + 1.0, beta, t));
                let tail_prob = 1.0 - beta_inc(alpha, beta, t);
                (hi - lo) * (tail_mean - t * tail_prob)
            }
            Self::Triangular { lo, hi, mode } => {
                // integral of the survival function from q to hi
                let span = hi - lo;
                if q >= mode {
                    if hi - mode <= 0.0 {
                        0.0
                    } else {
                        (hi - q).powi(3) / (3.0 * span * (hi - mode))
                    }
                } else {
                    let upper = if hi - mode <= 0.0 {
                        0.0
                    } else {
                        (hi - mode) * (hi - mode) / (3.0 * span)
                    };
                    let lower = (mode - q)
                        - ((mode - lo).powi(3) - (q - lo).powi(3)) / (3.0 * span * (mode - lo));
                    lower + upper
                }
            }
            Self::Discrete(ref d) => d.expected_shortfall(q),
        }
    }

    /// The moment data this distribution induces, with `beta` and `sigma`
    /// filled in.
    pub fn moment_spec(&self) -> MomentSpec {
        let (lo, hi) = self.support();
        MomentSpec::new(lo, self.mean(), hi, self.mad())
            .with_beta(self.prob_at_least_mean())
            .with_sigma(self.std_dev())
    }
}

/// Exact expected cost of ordering `q` under the given ground truths:
/// `sum_i c_i (d_i (q_i - mu_i) + (m_i + d_i) E(D_i - q_i)^+)`.
pub fn true_cost(econs: &[ItemEconomics], dists: &[GroundTruth], q: &[f64]) -> Result<f64> {
    if econs.len() != dists.len() || econs.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} economics, {} distributions, {} quantities",
            econs.len(),
            dists.len(),
            q.len()
        )));
    }
    Ok(econs
        .iter()
        .zip(dists)
        .zip(q)
        .map(|((e, dist), &qi)| {
            e.unit_cost
                * (e.discount * (qi - dist.mean())
                    + (e.markup + e.discount) * dist.expected_shortfall(qi))
        })
        .sum())
}

fn spend(econs: &[ItemEconomics], q: &[f64]) -> f64 {
    econs.iter().zip(q).map(|(e, &qi)| e.unit_cost * qi).sum()
}

/// Full-information optimum under a budget: each item follows the quantile
/// rule `q_i = F_i^{-1}((m_i - lambda)/(m_i + d_i))` with the multiplier
/// `lambda >= 0` bisected until the budget binds (or zero when slack).
///
/// Requires continuous ground truths; discrete distributions have
/// non-invertible CDFs and are rejected.
pub fn full_info_optimal(
    econs: &[ItemEconomics],
    dists: &[GroundTruth],
    budget: f64,
) -> Result<OrderingPolicy> {
    if econs.len() != dists.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} economics vs {} distributions",
            econs.len(),
            dists.len()
        )));
    }
    for (i, d) in dists.iter().enumerate() {
        if matches!(d, GroundTruth::Discrete(_)) {
            return Err(Error::InvalidParameters(format!(
                "item {i}: full-information optimum needs a continuous demand distribution"
            )));
        }
    }
    let q_at = |lambda: f64| -> Vec<f64> {
        econs
            .iter()
            .zip(dists)
            .map(|(e, dist)| {
                if lambda >= e.markup {
                    0.0
                } else {
                    let ratio = (e.markup - lambda) / (e.markup + e.discount);
                    dist.inverse_cdf(ratio)
                }
            })
            .collect()
    };

    let unconstrained = q_at(0.0);
    let mut q = if spend(econs, &unconstrained) <= budget + 1e-12 {
        unconstrained
    } else {
        let mut lo = 0.0f64;
        let mut hi = econs.iter().map(|e| e.markup).fold(0.0f64, f64::max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if spend(econs, &q_at(mid)) > budget {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * hi.max(1.0) {
                break;
            }
        }
        let mut q = q_at(hi);
        // a multiplier landing exactly on an item's mark-up leaves that
        // item's quantity free on [0, a_i]; spend the residual there
        let mut residual = budget - spend(econs, &q);
        if residual > 1e-12 {
            let width = (hi - lo).max(1e-12);
            for (i, e) in econs.iter().enumerate() {
                if (e.markup - hi).abs() <= 2.0 * width + 1e-9 {
                    let cap = dists[i].support().0;
                    let add = (residual / e.unit_cost).min(cap - q[i]).max(0.0);
                    q[i] += add;
                    residual -= add * e.unit_cost;
                    if residual <= 1e-12 {
                        break;
                    }
                }
            }
        }
        q
    };
    for v in q.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let objective = true_cost(econs, dists, &q)?;
    let spent = spend(econs, &q);
    Ok(OrderingPolicy {
        quantities: q,
        objective,
        spent,
        model: PolicyModel::FullInformation,
    })
}

/// Gallego-Moon mean-variance policy under a budget.
///
/// The per-item first-order condition gives
/// `q_i = mu_i + sigma_i w / sqrt(1 - w^2)` with
/// `w = (m_i - d_i - 2 lambda) / (m_i + d_i)`, clamped at zero; `lambda` is
/// bisected until the budget binds. At `lambda = 0` every item orders its
/// Scarf quantity.
pub fn gallego_moon_policy(
    econs: &[ItemEconomics],
    moments: &[(f64, f64)],
    budget: f64,
) -> Result<OrderingPolicy> {
    if econs.len() != moments.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} economics vs {} (mean, sd) pairs",
            econs.len(),
            moments.len()
        )));
    }
    for (i, &(_, sd)) in moments.iter().enumerate() {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(sd >= 0.0) {
            return Err(Error::InvalidParameters(format!(
                "item {i}: negative sd {sd}"
            )));
        }
    }
    let q_at = |lambda: f64| -> Vec<f64> {
        econs
            .iter()
            .zip(moments)
            .map(|(e, &(mu, sd))| {
                if lambda >= e.markup {
                    0.0
                } else {
                    let w = (e.markup - e.discount - 2.0 * lambda) / (e.markup + e.discount);
                    (mu + sd * w / (1.0 - w * w).sqrt()).max(0.0)
                }
            })
            .collect()
    };

    let unconstrained = q_at(0.0);
    let q = if spend(econs, &unconstrained) <= budget + 1e-12 {
        unconstrained
    } else {
        let mut lo = 0.0f64;
        let mut hi = econs.iter().map(|e| e.markup).fold(0.0f64, f64::max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if spend(econs, &q_at(mid)) > budget {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * hi.max(1.0) {
                break;
            }
        }
        let mut q = q_at(hi);
        // zero-variance items step from mu to 0 at lambda = m_i; spread the
        // residual over any such tie
        let mut residual = budget - spend(econs, &q);
        if residual > 1e-12 {
            let width = (hi - lo).max(1e-12);
            for (i, e) in econs.iter().enumerate() {
                if moments[i].1 == 0.0 && (e.markup - hi).abs() <= 2.0 * width + 1e-9 {
                    let add = (residual / e.unit_cost).min(moments[i].0 - q[i]).max(0.0);
                    q[i] += add;
                    residual -= add * e.unit_cost;
                    if residual <= 1e-12 {
                        break;
                    }
                }
            }
        }
        q
    };
    let objective: f64 = econs
        .iter()
        .zip(moments)
        .zip(&q)
        .map(|((e, &(mu, sd)), &qi)| scarf_cost(e, mu, sd, qi))
        .sum();
    let spent = spend(econs, &q);
    Ok(OrderingPolicy {
        quantities: q,
        objective,
        spent,
        model: PolicyModel::MeanVariance,
    })
}

fn mean_range_pieces(items: &[Item]) -> Result<Vec<GreedyPieces>> {
    items
        .iter()
        .map(|item| {
            let dist = mean_range_two_point(&item.spec)?;
            let (c, m, d) = (item.econ.unit_cost, item.econ.markup, item.econ.discount);
            if dist.is_point_mass() {
                return Ok(GreedyPieces {
                    unit_cost: c,
                    levels: vec![dist.min()],
                    slopes: vec![-c * m],
                });
            }
            let p_hi = dist.probs()[1];
            Ok(GreedyPieces {
                unit_cost: c,
                levels: vec![dist.min(), dist.max()],
                slopes: vec![-c * m, c * (d - (m + d) * p_hi)],
            })
        })
        .collect()
}

fn mean_range_cost(items: &[Item], q: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (item, &qi) in items.iter().zip(q) {
        let dist = mean_range_two_point(&item.spec)?;
        let (c, m, d) = (item.econ.unit_cost, item.econ.markup, item.econ.discount);
        total += c * (d * (qi - item.spec.mu) + (m + d) * dist.expected_shortfall(qi));
    }
    Ok(total)
}

/// The mean-range (Edmundson-Madansky) policy: each worst-case three-point
/// distribution is replaced by the two-point distribution on `{a, b}` and
/// the resulting two-piece knapsack solved by the same greedy walk.
pub fn em_policy(instance: &Instance) -> Result<OrderingPolicy> {
    instance.validate()?;
    let pieces = mean_range_pieces(&instance.items)?;
    let entries = ranked_entries(&pieces);
    let (quantities, spent) = greedy_allocate(&pieces, &entries, instance.budget);
    let objective = mean_range_cost(&instance.items, &quantities)?;
    Ok(OrderingPolicy {
        quantities,
        objective,
        spent,
        model: PolicyModel::MeanRange,
    })
}

/// Expected value of additional information: relative regret
/// `(C(q) - C(q_ref)) / C(q_ref)` under the true distributions.
pub fn evai(
    q: &[f64],
    q_ref: &[f64],
    econs: &[ItemEconomics],
    dists: &[GroundTruth],
) -> Result<f64> {
    let cost = true_cost(econs, dists, q)?;
    let reference = true_cost(econs, dists, q_ref)?;
    if reference == 0.0 {
        return Err(Error::EvaiUndefined);
    }
    Ok((cost - reference) / reference)
}

/// Mark-up regime of the bundled experiment presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarginRegime {
    Low,
    Average,
    High,
}

impl std::str::FromStr for MarginRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low" => Ok(Self::Low),
            "average" => Ok(Self::Average),
            "high" => Ok(Self::High),
            other => Err(Error::InvalidParameters(format!(
                "unknown margin regime `{other}` (expected low|average|high)"
            ))),
        }
    }
}

/// Mark-ups for the 25 preset items, strictly increasing in item index.
pub fn margin_markups(regime: MarginRegime) -> [f64; 25] {
    match regime {
        MarginRegime::Low => [
            0.1, 0.14, 0.18, 0.21, 0.25, 0.29, 0.33, 0.36, 0.4, 0.44, 0.48, 0.51, 0.55, 0.59, 0.63,
            0.66, 0.7, 0.74, 0.78, 0.81, 0.85, 0.89, 0.93, 0.96, 1.0,
        ],
        MarginRegime::Average => [
            1.0, 1.13, 1.25, 1.38, 1.5, 1.63, 1.75, 1.88, 2.0, 2.13, 2.25, 2.38, 2.5, 2.63, 2.75,
            2.88, 3.0, 3.13, 3.25, 3.38, 3.5, 3.63, 3.75, 3.88, 4.0,
        ],
        MarginRegime::High => [
            4.0, 4.21, 4.42, 4.63, 4.83, 5.04, 5.25, 5.46, 5.67, 5.88, 6.08, 6.29, 6.5, 6.71, 6.92,
            7.12, 7.33, 7.54, 7.75, 7.96, 8.17, 8.37, 8.58, 8.79, 9.0,
        ],
    }
}

/// The nine preset demand cases: three uniform ranges, three beta shapes on
/// `[0, 50]`, three triangular modes on `[10, 50]`.
pub fn demand_case(case: u8) -> Result<GroundTruth> {
    Ok(match case {
        1 => GroundTruth::Uniform { lo: 10.0, hi: 50.0 },
        2 => GroundTruth::Uniform {
            lo: 10.0,
            hi: 100.0,
        },
        3 => GroundTruth::Uniform {
            lo: 10.0,
            hi: 200.0,
        },
        4 => GroundTruth::ScaledBeta {
            alpha: 1.0,
            beta: 3.0,
            lo: 0.0,
            hi: 50.0,
        },
        5 => GroundTruth::ScaledBeta {
            alpha: 2.0,
            beta: 2.0,
            lo: 0.0,
            hi: 50.0,
        },
        6 => GroundTruth::ScaledBeta {
            alpha: 3.0,
            beta: 1.0,
            lo: 0.0,
            hi: 50.0,
        },
        7 => GroundTruth::Triangular {
            lo: 10.0,
            hi: 50.0,
            mode: 18.0,
        },
        8 => GroundTruth::Triangular {
            lo: 10.0,
            hi: 50.0,
            mode: 30.0,
        },
        9 => GroundTruth::Triangular {
            lo: 10.0,
            hi: 50.0,
            mode: 42.0,
        },
        other => {
            return Err(Error::InvalidParameters(format!(
                "case must be 1..=9, got {other}"
            )))
        }
    })
}

/// Configuration of one preset sweep: identical demand per [`demand_case`],
/// unit purchase cost and discount, mark-ups from the margin table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Number of items, at most 25.
    pub n_items: usize,
    pub margin: MarginRegime,
    /// Demand case id, 1..=9.
    pub case: u8,
    /// Budget grid resolution from 0 to the unconstrained optimum spend.
    pub grid_points: usize,
    pub seed: u64,
    /// Explicit budget grid overriding `grid_points` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn new(case: u8, margin: MarginRegime) -> Self {
        Self {
            n_items: 25,
            margin,
            case,
            grid_points: 101,
            seed: 0,
            budgets: None,
        }
    }

    /// Items for this preset: `c_i = d_i = 1`, mark-ups from the margin
    /// table, moments (with `beta`, `sigma`) from the demand case.
    pub fn build(&self) -> Result<(Vec<Item>, Vec<GroundTruth>)> {
        if self.n_items == 0 || self.n_items > 25 {
            return Err(Error::InvalidParameters(format!(
                "n_items must be in 1..=25, got {}",
                self.n_items
            )));
        }
        let dist = demand_case(self.case)?;
        let spec = dist.moment_spec();
        let markups = margin_markups(self.margin);
        let items = markups[..self.n_items]
            .iter()
            .map(|&m| Ok(Item::new(ItemEconomics::unit(m, 1.0)?, spec)))
            .collect::<Result<Vec<_>>>()?;
        let dists = vec![dist; self.n_items];
        Ok((items, dists))
    }
}

/// One output row of a budget sweep: a single item's quantity under one
/// policy at one budget, with the policy-level cost envelope and EVAI
/// repeated on each row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub budget: f64,
    pub policy: PolicyModel,
    pub item: usize,
    pub q: f64,
    pub cost_upper: f64,
    pub cost_lower: f64,
    pub cost_true: f64,
    pub evai: f64,
}

/// Worker-thread cap: `ROBUST_NV_THREADS` when set, else the machine's
/// available parallelism.
fn thread_cap() -> usize {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        if let Ok(n) = v.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// The budget grid for a preset: `grid_points` evenly spaced values from 0
/// to the unconstrained optimum spend `B_opt`.
pub fn default_budget_grid(
    econs: &[ItemEconomics],
    dists: &[GroundTruth],
    grid_points: usize,
) -> Result<Vec<f64>> {
    if econs.len() != dists.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} economics vs {} distributions",
            econs.len(),
            dists.len()
        )));
    }
    let unconstrained: f64 = econs
        .iter()
        .zip(dists)
        .map(|(e, d)| e.unit_cost * d.inverse_cdf(e.critical_ratio()))
        .sum();
    let k = grid_points.max(2);
    Ok((0..k)
        .map(|i| unconstrained * i as f64 / (k - 1) as f64)
        .collect())
}

struct PolicyEngines {
    upper_pieces: Vec<GreedyPieces>,
    upper_entries: Vec<RankedEntry>,
    lower_pieces: Vec<GreedyPieces>,
    lower_entries: Vec<RankedEntry>,
    range_pieces: Vec<GreedyPieces>,
    range_entries: Vec<RankedEntry>,
}

fn build_engines(items: &[Item]) -> Result<PolicyEngines> {
    let upper_pieces: Vec<GreedyPieces> = items
        .iter()
        .map(|item| {
            let pwl = pwl_pieces(&item.econ, &item.spec)?;
            Ok(GreedyPieces {
                unit_cost: item.econ.unit_cost,
                levels: pwl.breakpoints.to_vec(),
                slopes: pwl.slopes.to_vec(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let upper_entries = ranked_entries(&upper_pieces);
    let lower_pieces = lower_greedy_pieces(items)?;
    let lower_entries = ranked_entries(&lower_pieces);
    let range_pieces = mean_range_pieces(items)?;
    let range_entries = ranked_entries(&range_pieces);
    Ok(PolicyEngines {
        upper_pieces,
        upper_entries,
        lower_pieces,
        lower_entries,
        range_pieces,
        range_entries,
    })
}

fn sweep_one_budget(
    items: &[Item],
    econs: &[ItemEconomics],
    dists: &[GroundTruth],
    engines: &PolicyEngines,
    budget: f64,
) -> Result<Vec<SweepRow>> {
    let reference = full_info_optimal(econs, dists, budget)?;

    let (q_upper, _) = greedy_allocate(&engines.upper_pieces, &engines.upper_entries, budget);
    let (q_lower, _) = greedy_allocate(&engines.lower_pieces, &engines.lower_entries, budget);
    let (q_range, _) = greedy_allocate(&engines.range_pieces, &engines.range_entries, budget);
    let gm_moments: Vec<(f64, f64)> = dists.iter().map(|d| (d.mean(), d.std_dev())).collect();
    let gm = gallego_moon_policy(econs, &gm_moments, budget)?;

    let mut rows = Vec::with_capacity(items.len() * PolicyModel::ALL.len());
    let policies: [(PolicyModel, &[f64]); 5] = [
        (PolicyModel::RobustUpper, &q_upper),
        (PolicyModel::RobustLower, &q_lower),
        (PolicyModel::MeanRange, &q_range),
        (PolicyModel::MeanVariance, &gm.quantities),
        (PolicyModel::FullInformation, &reference.quantities),
    ];
    for (model, q) in policies {
        let cost_true = true_cost(econs, dists, q)?;
        let cost_upper = evaluate_upper(items, q)?;
        let cost_lower = evaluate_lower(items, q)?;
        let evai = if reference.objective == 0.0 {
            0.0
        } else {
            (cost_true - reference.objective) / reference.objective
        };
        for (i, &qi) in q.iter().enumerate() {
            rows.push(SweepRow {
                budget,
                policy: model,
                item: i,
                q: qi,
                cost_upper,
                cost_lower,
                cost_true,
                evai,
            });
        }
    }
    Ok(rows)
}

/// Evaluates every policy on every budget in `budgets`. Rows come back
/// ordered by `(budget index, policy, item)` regardless of worker
/// scheduling.
pub fn sweep_instance(
    items: &[Item],
    dists: &[GroundTruth],
    budgets: &[f64],
) -> Result<Vec<SweepRow>> {
    validate_items(items)?;
    if items.len() != dists.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} items vs {} distributions",
            items.len(),
            dists.len()
        )));
    }
    let econs: Vec<ItemEconomics> = items.iter().map(|it| it.econ).collect();
    let engines = build_engines(items)?;

    let workers = thread_cap().min(budgets.len()).max(1);
    let mut slots: Vec<Result<Vec<SweepRow>>> = Vec::with_capacity(budgets.len());
    if workers <= 1 {
        for &b in budgets {
            slots.push(sweep_one_budget(items, &econs, dists, &engines, b));
        }
    } else {
        let mut collected: Vec<Option<Result<Vec<SweepRow>>>> =
            (0..budgets.len()).map(|_| None).collect();
        let (tx, rx) = std::sync::mpsc::channel();
        std::thread::scope(|scope| {
            for w in 0..workers {
                let tx = tx.clone();
                let econs = &econs;
                let engines = &engines;
                scope.spawn(move || {
                    for idx in (w..budgets.len()).step_by(workers) {
                        let out = sweep_one_budget(items, econs, dists, engines, budgets[idx]);
                        if tx.send((idx, out)).is_err() {
                            return;
                        }
                    }
                });
            }
            drop(tx);
            for (idx, out) in rx {
                collected[idx] = Some(out);
            }
        });
        for slot in collected {
            slots.push(slot.expect("every budget index produced"));
        }
    }
    let mut rows = Vec::new();
    for slot in slots {
        rows.extend(slot?);
    }
    Ok(rows)
}

/// Runs the preset experiment described by `config`.
pub fn budget_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let (items, dists) = config.build()?;
    let econs: Vec<ItemEconomics> = items.iter().map(|it| it.econ).collect();
    let budgets = match &config.budgets {
        Some(b) => b.clone(),
        None => default_budget_grid(&econs, &dists, config.grid_points)?,
    };
    sweep_instance(&items, &dists, &budgets)
}
