//! Distributionally robust multi-item newsvendor with a budget constraint.
//!
//! Demand for each item is known only through its range `[a, b]`, mean `μ`
//! and mean absolute deviation (MAD) `δ`. Over that ambiguity set the
//! worst-case expected cost is attained by a three-point distribution on
//! `{a, μ, b}` that does not depend on the order quantity, so the minimax
//! ordering problem collapses to minimizing a sum of convex piecewise-linear
//! costs under the budget: a continuous knapsack solved by a greedy walk
//! over a ranked list of marginal cost slopes.
//!
//! The crate provides:
//!
//! - [`moments`]: ambiguity-set data, feasibility validation, and the
//!   extremal (worst-case three-point, best-case two-point, mean-range
//!   two-point) discrete distributions.
//! - [`single_item`]: classical quantile ordering, the worst-case cost and
//!   its piecewise-linear pieces, the closed-form robust order quantity,
//!   and Scarf's mean-variance rule.
//! - [`knapsack`]: the ranked list and greedy allocation for the budgeted
//!   multi-item problem, the matching lower-bound policy, and tight
//!   performance intervals.
//! - [`lp`]: a self-contained dense simplex solver with bounded variables
//!   plus an epigraph reformulation of piecewise-linear objectives; used as
//!   the equivalence oracle for the knapsack and as the engine for the
//!   extensions.
//! - [`baselines`]: ground-truth demand families, exact expected costs, the
//!   full-information optimum, Gallego-Moon mean-variance and
//!   Edmundson-Madansky mean-range policies, EVAI, and budget sweeps.
//! - [`extensions`]: multiple linear constraints, multiplicative supply
//!   yield, and worst-case CVaR, each reduced to a linear program.

pub mod baselines;
mod error;
pub mod extensions;
pub mod knapsack;
pub mod lp;
pub mod moments;
pub mod rng;
pub mod single_item;
pub mod special;

pub use error::{Error, Result};

pub use knapsack::{Instance, Item, OrderingPolicy, PolicyModel, RankedEntry, RankedList};
pub use moments::{DiscreteDistribution, MomentSpec, NamedDistribution, ValidationReport};
pub use single_item::{ItemEconomics, PwlCost, RobustQuantity};
