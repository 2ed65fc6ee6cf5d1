//! Greedy knapsack ordering for the budgeted multi-item robust newsvendor.
//!
//! Each item's worst-case cost is convex piecewise linear with breakpoints
//! at its minimal, mean, and maximal demand. Only pieces with negative
//! slope can lower the total cost, so the optimal policy ranks the pairs
//! `(item, piece)` by slope-to-cost ratio `slope / c_i` and lifts each
//! item's quantity to `a_i`, then `mu_i`, then `b_i` in that order until
//! the budget binds, finishing with a partial fill. The ranked list never
//! reads the budget, so growing the budget only extends the allocation;
//! earlier orders stay untouched.
//!
//! The same machinery runs the matching lower-bound model (two-point
//! best-case distributions, requiring `beta`), and both optima together
//! give a tight interval that contains the true optimal cost for every
//! demand distribution consistent with the data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{best_case_two_point, MomentSpec};
use crate::single_item::{pwl_pieces, worst_case_cost, ItemEconomics, PwlCost};

/// Guard against negative residual budget from accumulated rounding.
const RESIDUAL_GUARD: f64 = 1e-12;

/// One inventory item: its prices and its demand ambiguity data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub econ: ItemEconomics,
    pub spec: MomentSpec,
}

impl Item {
    pub fn new(econ: ItemEconomics, spec: MomentSpec) -> Self {
        Self { econ, spec }
    }
}

/// A multi-item problem: items plus the shared purchasing budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub items: Vec<Item>,
    pub budget: f64,
}

impl Instance {
    pub fn new(items: Vec<Item>, budget: f64) -> Result<Self> {
        let instance = Self { items, budget };
        instance.validate()?;
        Ok(instance)
    }

    /// Every item's moments must be feasible and the budget nonnegative.
    pub fn validate(&self) -> Result<()> {
        validate_items(&self.items)?;
        // negated comparison also rejects a NaN budget
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.budget >= 0.0) {
            return Err(Error::InvalidParameters(format!(
                "budget must be nonnegative, got {}",
                self.budget
            )));
        }
        Ok(())
    }
}

pub(crate) fn validate_items(items: &[Item]) -> Result<()> {
    for (i, item) in items.iter().enumerate() {
        let report = item.spec.validate();
        if !report.is_ok() {
            let mut report = report;
            for v in report.violations.iter_mut() {
                *v = format!("item {i}: {v}");
            }
            return Err(Error::InfeasibleMoments(report));
        }
    }
    Ok(())
}

/// One candidate increment in the ranked list: lifting `item` through
/// `piece` raises its quantity by `capacity` at `unit_cost` per unit,
/// changing the objective at rate `ratio = slope / unit_cost` per unit of
/// budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub item: usize,
    pub piece: usize,
    pub ratio: f64,
    pub capacity: f64,
    pub unit_cost: f64,
}

/// The ordered set of negative-slope increments driving the greedy
/// allocation. Built once per instance; valid for every budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub entries: Vec<RankedEntry>,
}

/// Which model produced an [`OrderingPolicy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyModel {
    RobustUpper,
    RobustLower,
    MeanRange,
    MeanVariance,
    #[serde(rename = "full-info")]
    FullInformation,
}

impl PolicyModel {
    pub const ALL: [PolicyModel; 5] = [
        PolicyModel::RobustUpper,
        PolicyModel::RobustLower,
        PolicyModel::MeanRange,
        PolicyModel::MeanVariance,
        PolicyModel::FullInformation,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            PolicyModel::RobustUpper => "robust-upper",
            PolicyModel::RobustLower => "robust-lower",
            PolicyModel::MeanRange => "mean-range",
            PolicyModel::MeanVariance => "mean-variance",
            PolicyModel::FullInformation => "full-info",
        }
    }
}

impl std::fmt::Display for PolicyModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// An ordering decision: per-item quantities, the producing model's
/// objective value at those quantities, and the capital spent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingPolicy {
    pub quantities: Vec<f64>,
    pub objective: f64,
    pub spent: f64,
    pub model: PolicyModel,
}

/// Convex piecewise-linear cost data in greedy form: quantity levels to
/// lift through and the slope active below each level.
#[derive(Debug, Clone)]
pub(crate) struct GreedyPieces {
    pub unit_cost: f64,
    pub levels: Vec<f64>,
    pub slopes: Vec<f64>,
}

/// Negative-slope entries sorted by `(ratio, item, piece)`. Zero-capacity
/// and zero-slope entries are excluded.
pub(crate) fn ranked_entries(items: &[GreedyPieces]) -> Vec<RankedEntry> {
    let mut entries = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let mut prev = 0.0;
        for (j, (&level, &slope)) in item.levels.iter().zip(&item.slopes).enumerate() {
            let capacity = (level - prev).max(0.0);
            prev = level.max(prev);
            if slope < 0.0 && capacity > 0.0 {
                entries.push(RankedEntry {
                    item: i,
                    piece: j,
                    ratio: slope / item.unit_cost,
                    capacity,
                    unit_cost: item.unit_cost,
                });
            }
        }
    }
    entries.sort_by(|x, y| {
        x.ratio
            .total_cmp(&y.ratio)
            .then(x.item.cmp(&y.item))
            .then(x.piece.cmp(&y.piece))
    });
    entries
}

/// Walks the ranked list, lifting quantities level by level until the
/// budget binds; the final item gets a partial fill that spends the exact
/// residual. Returns `(quantities, spent)`.
pub(crate) fn greedy_allocate(
    items: &[GreedyPieces],
    entries: &[RankedEntry],
    budget: f64,
) -> (Vec<f64>, f64) {
    let mut q = vec![0.0; items.len()];
    let mut spent = 0.0;
    for entry in entries {
        let level = items[entry.item].levels[entry.piece];
        let increment = level - q[entry.item];
        if increment <= 0.0 {
            continue;
        }
        let cost = entry.unit_cost * increment;
        if spent + cost <= budget {
            q[entry.item] = level;
            spent += cost;
        } else {
            let residual = (budget - spent).max(0.0);
            debug_assert!(budget - spent > -RESIDUAL_GUARD * budget.abs().max(1.0));
            q[entry.item] = (q[entry.item] + residual / entry.unit_cost).min(level);
            spent += residual;
            break;
        }
    }
    (q, spent)
}

fn upper_pieces(items: &[Item]) -> Result<Vec<(GreedyPieces, PwlCost)>> {
    items
        .iter()
        .map(|item| {
            let pwl = pwl_pieces(&item.econ, &item.spec)?;
            Ok((
                GreedyPieces {
                    unit_cost: item.econ.unit_cost,
                    levels: pwl.breakpoints.to_vec(),
                    slopes: pwl.slopes.to_vec(),
                },
                pwl,
            ))
        })
        .collect()
}

pub(crate) fn lower_greedy_pieces(items: &[Item]) -> Result<Vec<GreedyPieces>> {
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let beta = item.spec.beta.ok_or(Error::BetaRequired { item: i })?;
            let dist = best_case_two_point(&item.spec).map_err(|e| match e {
                Error::BetaRequired { .. } => Error::BetaRequired { item: i },
                other => other,
            })?;
            let (c, m, d) = (item.econ.unit_cost, item.econ.markup, item.econ.discount);
            let (low, high) = (dist.min(), dist.max());
            if dist.is_point_mass() {
                return Ok(GreedyPieces {
                    unit_cost: c,
                    levels: vec![low],
                    slopes: vec![-c * m],
                });
            }
            Ok(GreedyPieces {
                unit_cost: c,
                levels: vec![low, high],
                slopes: vec![-c * m, c * (d - (m + d) * beta)],
            })
        })
        .collect()
}

/// Epigraph pieces of an item's worst-case cost, valid for every `q >= 0`:
/// the three breakpoint pieces plus the linear extension of slope
/// `c d` that the cost follows beyond the upper support. Without the
/// extension the pointwise maximum understates the cost for `q > b`, and
/// an epigraph LP over high-markup items (top piece still decreasing)
/// would be unbounded.
pub fn epigraph_pieces(item: &Item) -> Result<Vec<(f64, f64)>> {
    let pwl = pwl_pieces(&item.econ, &item.spec)?;
    let mut pieces: Vec<(f64, f64)> = pwl
        .slopes
        .iter()
        .cloned()
        .zip(pwl.intercepts.iter().cloned())
        .collect();
    let (c, d) = (item.econ.unit_cost, item.econ.discount);
    let extension = (c * d, -c * d * item.spec.mu);
    if (pieces[2].0 - extension.0).abs() > 1e-15 * (1.0 + extension.0.abs()) {
        pieces.push(extension);
    }
    Ok(pieces)
}

/// Per-item piecewise-linear coefficients of the worst-case cost.
pub fn build_coefficients(instance: &Instance) -> Result<Vec<PwlCost>> {
    instance.validate()?;
    Ok(upper_pieces(&instance.items)?
        .into_iter()
        .map(|(_, pwl)| pwl)
        .collect())
}

/// The ranked increment list for the worst-case model. Independent of the
/// budget: the same list serves every budget level.
pub fn build_ranked_list(instance: &Instance) -> Result<RankedList> {
    instance.validate()?;
    let pieces: Vec<GreedyPieces> = upper_pieces(&instance.items)?
        .into_iter()
        .map(|(g, _)| g)
        .collect();
    Ok(RankedList {
        entries: ranked_entries(&pieces),
    })
}

/// Runs the greedy walk over the ranked list and returns the robust
/// ordering policy with its worst-case objective.
pub fn knapsack_allocate(instance: &Instance) -> Result<OrderingPolicy> {
    instance.validate()?;
    let pieces: Vec<GreedyPieces> = upper_pieces(&instance.items)?
        .into_iter()
        .map(|(g, _)| g)
        .collect();
    let entries = ranked_entries(&pieces);
    let (quantities, spent) = greedy_allocate(&pieces, &entries, instance.budget);
    let objective = evaluate_upper(&instance.items, &quantities)?;
    Ok(OrderingPolicy {
        quantities,
        objective,
        spent,
        model: PolicyModel::RobustUpper,
    })
}

/// Re-runs the allocation for a different budget using a prebuilt ranked
/// list (which must come from [`build_ranked_list`] on the same items).
pub fn allocate_with_ranked_list(
    items: &[Item],
    list: &RankedList,
    budget: f64,
) -> Result<OrderingPolicy> {
    let pieces: Vec<GreedyPieces> = upper_pieces(items)?.into_iter().map(|(g, _)| g).collect();
    let (quantities, spent) = greedy_allocate(&pieces, &list.entries, budget);
    let objective = evaluate_upper(items, &quantities)?;
    Ok(OrderingPolicy {
        quantities,
        objective,
        spent,
        model: PolicyModel::RobustUpper,
    })
}

/// Solves the matching lower-bound model: the analogous two-piece knapsack
/// over the best-case two-point breakpoints. Every item needs `beta`.
pub fn lower_bound_policy(instance: &Instance) -> Result<OrderingPolicy> {
    instance.validate()?;
    let pieces = lower_greedy_pieces(&instance.items)?;
    let entries = ranked_entries(&pieces);
    let (quantities, spent) = greedy_allocate(&pieces, &entries, instance.budget);
    let objective = evaluate_lower(&instance.items, &quantities)?;
    Ok(OrderingPolicy {
        quantities,
        objective,
        spent,
        model: PolicyModel::RobustLower,
    })
}

/// Worst-case expected cost of an arbitrary ordering `q`: the sum of
/// per-item worst-case costs.
pub fn evaluate_upper(items: &[Item], q: &[f64]) -> Result<f64> {
    if items.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} items but {} quantities",
            items.len(),
            q.len()
        )));
    }
    items
        .iter()
        .zip(q)
        .map(|(item, &qi)| worst_case_cost(&item.econ, &item.spec, qi))
        .sum()
}

/// Best-case expected cost of an ordering `q` under the two-point
/// distributions; requires `beta` on every item.
pub fn evaluate_lower(items: &[Item], q: &[f64]) -> Result<f64> {
    if items.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} items but {} quantities",
            items.len(),
            q.len()
        )));
    }
    let mut total = 0.0;
    for (i, (item, &qi)) in items.iter().zip(q).enumerate() {
        if item.spec.beta.is_none() {
            return Err(Error::BetaRequired { item: i });
        }
        let dist = best_case_two_point(&item.spec)?;
        let (c, m, d) = (item.econ.unit_cost, item.econ.markup, item.econ.discount);
        total += c * (d * (qi - item.spec.mu) + (m + d) * dist.expected_shortfall(qi));
    }
    Ok(total)
}

/// The tight performance interval `[lower, upper]`: optimal values of the
/// best-case and worst-case models at this budget. The optimal cost under
/// any distribution consistent with the data lies inside.
pub fn performance_interval(instance: &Instance) -> Result<(f64, f64)> {
    let lower = lower_bound_policy(instance)?.objective;
    let upper = knapsack_allocate(instance)?.objective;
    Ok((lower, upper))
}
