//! Extensions of the budgeted robust newsvendor, each reduced to a linear
//! program: multiple linear resource constraints, multiplicative supply
//! yield, and worst-case CVaR.
//!
//! All three replace the expectation over the ambiguity set by its
//! worst-case discrete distribution(s) and linearize the positive parts
//! with auxiliary variables:
//!
//! - multiple constraints: one `tau` per (item, demand point), rows
//!   `tau >= xi - q`;
//! - multiplicative yield `Z q` with `Z` in its own mean-MAD set: one `tau`
//!   per (item, demand point, yield point), rows `tau >= xi - zeta q`;
//! - CVaR at level `gamma`: scenario variables `eta` over the product
//!   support of all items (at most `3^n`, hard-capped) plus a free
//!   threshold `theta`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knapsack::{validate_items, Item, OrderingPolicy, PolicyModel};
use crate::lp::{solve_lp, ConstraintSense, LinearProgram, LpSolution, LpStatus};
use crate::moments::{worst_case_three_point, DiscreteDistribution, MomentSpec};

/// Hard cap on CVaR scenario enumeration (`3^n` scenarios).
pub const MAX_CVAR_ITEMS: usize = 12;

/// Policy plus the shadow prices of the resource constraints: the marginal
/// worst-case cost reduction per extra unit of each budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiConstraintPolicy {
    pub policy: OrderingPolicy,
    pub shadow_prices: Vec<f64>,
}

/// Risk-averse policy: the ordering, the optimal CVaR objective, and the
/// optimal threshold `theta` (the value-at-risk anchor).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvarPolicy {
    pub policy: OrderingPolicy,
    pub theta: f64,
    pub gamma: f64,
}

fn worst_case_distributions(items: &[Item]) -> Result<Vec<DiscreteDistribution>> {
    items
        .iter()
        .map(|item| worst_case_three_point(&item.spec))
        .collect()
}

/// Minimizes the worst-case expected cost under `m` linear resource
/// constraints `sum_i weights[j][i] q_i <= budgets[j]`.
///
/// Solves the auxiliary-variable LP directly and reports the dual values
/// of the budget rows as shadow prices (cost reduction per unit of extra
/// budget, nonnegative for binding rows).
pub fn multi_constraint_policy(
    items: &[Item],
    weights: &[Vec<f64>],
    budgets: &[f64],
) -> Result<MultiConstraintPolicy> {
    validate_items(items)?;
    if weights.len() != budgets.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} constraint rows vs {} budgets",
            weights.len(),
            budgets.len()
        )));
    }
    let n = items.len();
    for (j, row) in weights.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "constraint {j} has {} coefficients for {n} items",
                row.len()
            )));
        }
        if row.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "constraint {j}: weights must be nonnegative and finite"
            )));
        }
    }
    let dists = worst_case_distributions(items)?;

    // variables: q_0..q_{n-1}, then tau grouped per item
    let mut tau_offset = vec![0usize; n];
    let mut nvars = n;
    for (i, dist) in dists.iter().enumerate() {
        tau_offset[i] = nvars;
        nvars += dist.len();
    }
    let mut objective = vec![0.0; nvars];
    let mut constant = 0.0;
    for (i, item) in items.iter().enumerate() {
        let (c, m, d) = (item.econ.unit_cost, item.econ.markup, item.econ.discount);
        objective[i] = c * d;
        constant -= c * d * item.spec.mu;
        for (k, &p) in dists[i].probs().iter().enumerate() {
            objective[tau_offset[i] + k] = c * (m + d) * p;
        }
    }
    let mut lp = LinearProgram::new(objective);
    for (row, &limit) in weights.iter().zip(budgets) {
        let mut coeffs = vec![0.0; nvars];
        coeffs[..n].copy_from_slice(row);
        lp.add_constraint(coeffs, ConstraintSense::LessEq, limit);
    }
    for (i, dist) in dists.iter().enumerate() {
        for (k, &point) in dist.points().iter().enumerate() {
            // tau_ik >= xi_ik - q_i
            let mut coeffs = vec![0.0; nvars];
            coeffs[tau_offset[i] + k] = 1.0;
            coeffs[i] = 1.0;
            lp.add_constraint(coeffs, ConstraintSense::GreaterEq, point);
        }
    }
    let sol = checked_solve(&lp)?;
    let quantities = sol.x[..n].to_vec();
    let spent: f64 = weights
        .first()
        .map(|row| row.iter().zip(&quantities).map(|(w, q)| w * q).sum())
        .unwrap_or(0.0);
    let shadow_prices: Vec<f64> = sol.duals[..weights.len()].iter().map(|d| -d).collect();
    Ok(MultiConstraintPolicy {
        policy: OrderingPolicy {
            quantities,
            objective: sol.objective + constant,
            spent,
            model: PolicyModel::RobustUpper,
        },
        shadow_prices,
    })
}

fn validate_yields(items: &[Item], yields: &[MomentSpec]) -> Result<()> {
    if yields.len() != items.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} items vs {} yield specs",
            items.len(),
            yields.len()
        )));
    }
    for (i, y) in yields.iter().enumerate() {
        let mut report = y.validate();
        if y.b > 1.0 + crate::moments::BOUND_TOL {
            report
                .violations
                .push(format!("yield upper support {} exceeds 1", y.b));
        }
        if !report.is_ok() {
            for v in report.violations.iter_mut() {
                *v = format!("yield {i}: {v}");
            }
            return Err(Error::InfeasibleMoments(report));
        }
    }
    Ok(())
}

/// Builds the LP for the multiplicative-yield model: delivered stock is
/// `Z_i q_i` with demand and yield each in their own mean-MAD set,
/// independent per item. Objective includes the `d_i (mu~_i q_i - mu_i)`
/// linear term plus the scenario-weighted shortfall over the product of
/// both worst-case three-point distributions.
///
/// Returns the program plus the additive constant folded out of the
/// objective. Variables: `q_0..q_{n-1}` then `tau` per (item, demand point,
/// yield point).
pub fn yield_lp(
    items: &[Item],
    yields: &[MomentSpec],
    budget: f64,
) -> Result<(LinearProgram, f64)> {
    validate_items(items)?;
    validate_yields(items, yields)?;
    let demand = worst_case_distributions(items)?;
    let supply: Vec<DiscreteDistribution> = yields
        .iter()
        .map(worst_case_three_point)
        .collect::<Result<_>>()?;

    let n = items.len();
    let mut tau_offset = vec![0usize; n];
    let mut nvars = n;
    for i in 0..n {
        tau_offset[i] = nvars;
        nvars += demand[i].len() * supply[i].len();
    }
    let mut objective = vec![0.0; nvars];
    let mut constant = 0.0;
    for (i, item) in items.iter().enumerate() {
        let (c, m, d) = (item.econ.unit_cost, item.econ.markup, item.econ.discount);
        objective[i] = c * d * yields[i].mu;
        constant -= c * d * item.spec.mu;
        let mut slot = tau_offset[i];
        for &p_d in demand[i].probs() {
            for &p_z in supply[i].probs() {
                objective[slot] = c * (m + d) * p_d * p_z;
                slot += 1;
            }
        }
    }
    let mut lp = LinearProgram::new(objective);
    let mut budget_row = vec![0.0; nvars];
    for (i, item) in items.iter().enumerate() {
        budget_row[i] = item.econ.unit_cost;
    }
    lp.add_constraint(budget_row, ConstraintSense::LessEq, budget);
    for i in 0..n {
        let mut slot = tau_offset[i];
        for &xi in demand[i].points() {
            for &zeta in supply[i].points() {
                // tau >= xi - zeta q_i
                let mut coeffs = vec![0.0; nvars];
                coeffs[slot] = 1.0;
                coeffs[i] = zeta;
                lp.add_constraint(coeffs, ConstraintSense::GreaterEq, xi);
                slot += 1;
            }
        }
    }
    Ok((lp, constant))
}

/// Worst-case expected cost of the yield model at a fixed ordering:
/// the exact double expectation over both three-point distributions.
pub fn yield_worst_case_cost(items: &[Item], yields: &[MomentSpec], q: &[f64]) -> Result<f64> {
    validate_items(items)?;
    validate_yields(items, yields)?;
    if q.len() != items.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} items vs {} quantities",
            items.len(),
            q.len()
        )));
    }
    let demand = worst_case_distributions(items)?;
    let supply: Vec<DiscreteDistribution> = yields
        .iter()
        .map(worst_case_three_point)
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    for (i, item) in items.iter().enumerate() {
        let (c, m, d) = (item.econ.unit_cost, item.econ.markup, item.econ.discount);
        let mut shortfall = 0.0;
        for (&xi, &p_d) in demand[i].points().iter().zip(demand[i].probs()) {
            for (&zeta, &p_z) in supply[i].points().iter().zip(supply[i].probs()) {
                shortfall += p_d * p_z * (xi - zeta * q[i]).max(0.0);
            }
        }
        total += c * (d * (yields[i].mu * q[i] - item.spec.mu) + (m + d) * shortfall);
    }
    Ok(total)
}

/// Optimal robust policy under multiplicative yield ambiguity.
pub fn yield_robust_policy(
    items: &[Item],
    yields: &[MomentSpec],
    budget: f64,
) -> Result<OrderingPolicy> {
    let (lp, constant) = yield_lp(items, yields, budget)?;
    let sol = checked_solve(&lp)?;
    let n = items.len();
    let quantities = sol.x[..n].to_vec();
    let spent: f64 = items
        .iter()
        .zip(&quantities)
        .map(|(it, &qi)| it.econ.unit_cost * qi)
        .sum();
    Ok(OrderingPolicy {
        quantities,
        objective: sol.objective + constant,
        spent,
        model: PolicyModel::RobustUpper,
    })
}

/// Minimizes the worst-case CVaR at level `gamma` over the ambiguity set.
///
/// Enumerates the product support of all items' worst-case three-point
/// distributions (capped at [`MAX_CVAR_ITEMS`] items), introduces one
/// `eta` variable per scenario and a free threshold `theta`, and solves
///
/// ```text
/// min theta + (1 - gamma)^-1 sum_kappa P_kappa eta_kappa
/// ```
///
/// subject to `eta_kappa >= cost(q, xi_kappa) - theta`, the budget row and
/// nonnegativity. At `gamma = 0` the optimum equals the risk-neutral
/// worst-case expected cost.
pub fn cvar_robust_policy(items: &[Item], budget: f64, gamma: f64) -> Result<CvarPolicy> {
    validate_items(items)?;
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidParameters(format!(
            "gamma must lie in [0, 1), got {gamma}"
        )));
    }
    if items.len() > MAX_CVAR_ITEMS {
        return Err(Error::TooManyScenarios {
            items: items.len(),
            max: MAX_CVAR_ITEMS,
        });
    }
    let dists = worst_case_distributions(items)?;
    let n = items.len();
    let n_scenarios: usize = dists.iter().map(|d| d.len()).product();

    // variables: q (n), theta (1), tau per (item, demand point), eta per scenario
    let theta_col = n;
    let mut tau_offset = vec![0usize; n];
    let mut col = n + 1;
    for i in 0..n {
        tau_offset[i] = col;
        col += dists[i].len();
    }
    let eta_offset = col;
    let nvars = col + n_scenarios;

    let mut objective = vec![0.0; nvars];
    objective[theta_col] = 1.0;
    let mut lp;
    {
        // scenario probabilities and per-scenario constant cost terms
        let mut scenario_probs = vec![1.0; n_scenarios];
        let mut scenario_consts = vec![0.0; n_scenarios];
        let mut scenario_kappa = vec![vec![0usize; n]; n_scenarios];
        for s in 0..n_scenarios {
            let mut rem = s;
            for i in 0..n {
                let k = rem % dists[i].len();
                rem /= dists[i].len();
                scenario_kappa[s][i] = k;
                scenario_probs[s] *= dists[i].probs()[k];
                let (c, d) = (items[i].econ.unit_cost, items[i].econ.discount);
                scenario_consts[s] -= c * d * dists[i].points()[k];
            }
        }
        for s in 0..n_scenarios {
            objective[eta_offset + s] = scenario_probs[s] / (1.0 - gamma);
        }
        lp = LinearProgram::new(objective);
        lp.set_bounds(theta_col, f64::NEG_INFINITY, f64::INFINITY);

        let mut budget_row = vec![0.0; nvars];
        for (i, item) in items.iter().enumerate() {
            budget_row[i] = item.econ.unit_cost;
        }
        lp.add_constraint(budget_row, ConstraintSense::LessEq, budget);

        // eta_s + theta - sum_i (c_i d_i q_i + c_i (m_i + d_i) tau_{i,kappa_i})
        //   >= -sum_i c_i d_i xi_{kappa_i}
        for s in 0..n_scenarios {
            let mut coeffs = vec![0.0; nvars];
            coeffs[eta_offset + s] = 1.0;
            coeffs[theta_col] = 1.0;
            for (i, item) in items.iter().enumerate() {
                let (c, m, d) = (item.econ.unit_cost, item.econ.markup, item.econ.discount);
                coeffs[i] -= c * d;
                coeffs[tau_offset[i] + scenario_kappa[s][i]] -= c * (m + d);
            }
            lp.add_constraint(coeffs, ConstraintSense::GreaterEq, scenario_consts[s]);
        }
        for i in 0..n {
            for (k, &xi) in dists[i].points().iter().enumerate() {
                let mut coeffs = vec![0.0; nvars];
                coeffs[tau_offset[i] + k] = 1.0;
                coeffs[i] = 1.0;
                lp.add_constraint(coeffs, ConstraintSense::GreaterEq, xi);
            }
        }
    }
    let sol = checked_solve(&lp)?;
    let quantities = sol.x[..n].to_vec();
    let spent: f64 = items
        .iter()
        .zip(&quantities)
        .map(|(it, &qi)| it.econ.unit_cost * qi)
        .sum();
    Ok(CvarPolicy {
        policy: OrderingPolicy {
            quantities,
            objective: sol.objective,
            spent,
            model: PolicyModel::RobustUpper,
        },
        theta: sol.x[theta_col],
        gamma,
    })
}

fn checked_solve(lp: &LinearProgram) -> Result<LpSolution> {
    let sol = solve_lp(lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol),
        LpStatus::Infeasible => Err(Error::InfeasibleConstraints),
        LpStatus::Unbounded => Err(Error::Numerical("extension LP unbounded".into())),
    }
}
