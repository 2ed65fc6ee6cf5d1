//! Single-item newsvendor: classical quantile rule, worst-case cost under
//! mean-MAD-range ambiguity, its piecewise-linear pieces, the closed-form
//! robust order quantity, and Scarf's mean-variance rule.
//!
//! With purchase cost `c`, mark-up `m` (selling price `c(1+m)`) and discount
//! factor `d` (salvage value `(1-d)c`), the expected cost of ordering `q` is
//!
//! ```text
//! C(q) = c ( d (q - mu) + (m + d) E(D - q)^+ ).
//! ```
//!
//! Replacing the expectation by its tight mean-MAD bound gives the worst-case
//! cost, a pointwise maximum of three linear pieces whose breakpoints are the
//! support endpoints and the mean. Its minimizer is therefore always one of
//! `a`, `mu`, `b`, selected by simple slope-sign conditions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{worst_case_three_point, MomentSpec};

/// Slopes with magnitude at or below this are treated as flat; the whole
/// segment is then optimal and reported as an interval.
pub const FLAT_SLOPE_TOL: f64 = 1e-12;

/// Bisection tolerance on quantities.
pub const QUANTITY_TOL: f64 = 1e-10;

/// Per-item prices: purchase cost `c`, mark-up `m`, discount factor `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ItemEconomics {
    pub unit_cost: f64,
    pub markup: f64,
    pub discount: f64,
}

impl ItemEconomics {
    pub fn new(unit_cost: f64, markup: f64, discount: f64) -> Result<Self> {
        if !(unit_cost > 0.0 && unit_cost.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "unit cost must be positive, got {unit_cost}"
            )));
        }
        if !(markup > 0.0 && markup.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "mark-up must be positive, got {markup}"
            )));
        }
        if !(discount > 0.0 && discount.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "discount factor must be positive, got {discount}"
            )));
        }
        Ok(Self {
            unit_cost,
            markup,
            discount,
        })
    }

    /// Unit purchase cost 1 with the given mark-up and discount.
    pub fn unit(markup: f64, discount: f64) -> Result<Self> {
        Self::new(1.0, markup, discount)
    }

    /// Selling price `p = c (1 + m)`.
    pub fn selling_price(&self) -> f64 {
        self.unit_cost * (1.0 + self.markup)
    }

    /// Salvage value `s = (1 - d) c`.
    pub fn salvage_value(&self) -> f64 {
        (1.0 - self.discount) * self.unit_cost
    }

    /// The classical critical ratio `m / (m + d)`.
    pub fn critical_ratio(&self) -> f64 {
        self.markup / (self.markup + self.discount)
    }
}

/// The three linear pieces of the worst-case cost on `[0, b]`:
/// `C(q) = max_j (slope_j * q + intercept_j)` with breakpoints `a, mu, b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PwlCost {
    pub slopes: [f64; 3],
    pub intercepts: [f64; 3],
    /// `[a, mu, b]`.
    pub breakpoints: [f64; 3],
}

impl PwlCost {
    /// Pointwise maximum over the three pieces; equals the worst-case cost
    /// for `q` in `[0, b]`.
    pub fn value(&self, q: f64) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for j in 0..3 {
            best = best.max(self.slopes[j] * q + self.intercepts[j]);
        }
        best
    }
}

/// Result of the classical quantile rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileResult {
    pub q: f64,
    /// False when the CDF never reaches the critical ratio on the support;
    /// `q` is then the upper endpoint.
    pub ratio_attained: bool,
}

/// Smallest `q` with `F(q) >= m/(m+d)`, located by bisection on the support.
///
/// `cdf` must be nondecreasing and right-continuous on `[support.0, support.1]`.
pub fn classical_optimal_quantity(
    econ: &ItemEconomics,
    cdf: impl Fn(f64) -> f64,
    support: (f64, f64),
) -> QuantileResult {
    let ratio = econ.critical_ratio();
    let (lo, hi) = support;
    if cdf(hi) < ratio {
        return QuantileResult {
            q: hi,
            ratio_attained: false,
        };
    }
    if cdf(lo) >= ratio {
        return QuantileResult {
            q: lo,
            ratio_attained: true,
        };
    }
    let (mut left, mut right) = (lo, hi);
    while right - left > QUANTITY_TOL {
        let mid = 0.5 * (left + right);
        if cdf(mid) >= ratio {
            right = mid;
        } else {
            left = mid;
        }
    }
    QuantileResult {
        q: right,
        ratio_attained: true,
    }
}

/// Worst-case expected cost `c (d (q - mu) + (m + d) E(D - q)^+)` with the
/// expectation taken under the worst-case three-point distribution.
///
/// Defined for any `q >= 0`; beyond `b` the cost grows linearly with slope
/// `c d`.
pub fn worst_case_cost(econ: &ItemEconomics, spec: &MomentSpec, q: f64) -> Result<f64> {
    let dist = worst_case_three_point(spec)?;
    Ok(econ.unit_cost
        * (econ.discount * (q - spec.mu)
            + (econ.markup + econ.discount) * dist.expected_shortfall(q)))
}

/// The three `(slope, intercept)` pairs of the worst-case cost.
///
/// With `r_a = mad / (2(mu - a))` and `r_b = mad / (2(b - mu))` (zero when
/// the denominator vanishes):
///
/// ```text
/// slope_0 = -c m                  intercept_0 = c m mu
/// slope_1 = c ((m + d) r_a - m)   intercept_1 = c (m + d)(mu - r_a a) - c d mu
/// slope_2 = c (d - (m + d) r_b)   intercept_2 = c (m + d) r_b b - c d mu
/// ```
pub fn pwl_pieces(econ: &ItemEconomics, spec: &MomentSpec) -> Result<PwlCost> {
    let report = spec.validate();
    if !report.is_ok() {
        return Err(Error::InfeasibleMoments(report));
    }
    let (c, m, d) = (econ.unit_cost, econ.markup, econ.discount);
    let r_a = if spec.mu - spec.a > 0.0 {
        spec.mad / (2.0 * (spec.mu - spec.a))
    } else {
        0.0
    };
    let r_b = if spec.b - spec.mu > 0.0 {
        spec.mad / (2.0 * (spec.b - spec.mu))
    } else {
        0.0
    };
    let slopes = [-c * m, c * ((m + d) * r_a - m), c * (d - (m + d) * r_b)];
    let intercepts = [
        c * m * spec.mu,
        c * (m + d) * (spec.mu - r_a * spec.a) - c * d * spec.mu,
        c * (m + d) * r_b * spec.b - c * d * spec.mu,
    ];
    Ok(PwlCost {
        slopes,
        intercepts,
        breakpoints: [spec.a, spec.mu, spec.b],
    })
}

/// The robust order quantity plus the full optimal set.
///
/// The minimizer of a convex piecewise-linear function sits at a breakpoint;
/// ties (a flat piece) produce a nondegenerate interval and `q` is its left
/// endpoint, the smallest capital outlay among optima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustQuantity {
    pub q: f64,
    pub interval: (f64, f64),
}

/// Minimizes the worst-case cost over `q >= 0` in closed form: the answer is
/// `a`, `mu` or `b` depending on the signs of the middle and upper slopes.
pub fn robust_order_quantity(econ: &ItemEconomics, spec: &MomentSpec) -> Result<RobustQuantity> {
    let pieces = pwl_pieces(econ, spec)?;
    let [a, mu, b] = pieces.breakpoints;
    let mid = pieces.slopes[1];
    let high = pieces.slopes[2];
    let point = |q: f64| RobustQuantity {
        q,
        interval: (q, q),
    };
    Ok(if mid.abs() <= FLAT_SLOPE_TOL {
        if high.abs() <= FLAT_SLOPE_TOL {
            RobustQuantity {
                q: a,
                interval: (a, b),
            }
        } else {
            RobustQuantity {
                q: a,
                interval: (a, mu),
            }
        }
    } else if mid > 0.0 {
        point(a)
    } else if high.abs() <= FLAT_SLOPE_TOL {
        RobustQuantity {
            q: mu,
            interval: (mu, b),
        }
    } else if high > 0.0 {
        point(mu)
    } else {
        point(b)
    })
}

/// Scarf's order quantity `mu + (sigma/2)(sqrt(m/d) - sqrt(d/m))`, clamped
/// to zero when the formula goes negative.
pub fn scarf_quantity(econ: &ItemEconomics, mu: f64, sigma: f64) -> f64 {
    let (m, d) = (econ.markup, econ.discount);
    (mu + sigma / 2.0 * ((m / d).sqrt() - (d / m).sqrt())).max(0.0)
}

/// Scarf's worst-case cost bound under mean-variance ambiguity:
/// `c ( d(q - mu) + (m + d)(sqrt(sigma^2 + (mu - q)^2) + (mu - q)) / 2 )`.
pub fn scarf_cost(econ: &ItemEconomics, mu: f64, sigma: f64, q: f64) -> f64 {
    let (c, m, d) = (econ.unit_cost, econ.markup, econ.discount);
    let gap = mu - q;
    c * (d * (q - mu) + (m + d) * ((sigma * sigma + gap * gap).sqrt() + gap) / 2.0)
}
