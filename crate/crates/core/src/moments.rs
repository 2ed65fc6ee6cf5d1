//! Mean-MAD-range ambiguity sets and their extremal distributions.
//!
//! Demand is described by support `[a, b]`, mean `mu` and mean absolute
//! deviation `mad`, optionally extended with the skewness parameter
//! `beta = P(D >= mu)` and a standard deviation for mean-variance baselines.
//! Feasible moment data satisfies
//!
//! ```text
//! 0 <= mad <= 2(b - mu)(mu - a) / (b - a),
//! mad / (2(b - mu)) <= beta <= 1 - mad / (2(mu - a)).
//! ```
//!
//! Over all distributions matching `(mu, mad, [a, b])`, the expectation of
//! any convex function is maximized by a unique three-point distribution on
//! `{a, mu, b}` and, once `beta` is known, minimized by a two-point
//! distribution, both independent of the decision variable. These extremal
//! laws are what the ordering policies in the rest of the crate optimize
//! against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// Absolute tolerance on the validation inequalities; user-entered moments
/// are often rounded.
pub const BOUND_TOL: f64 = 1e-9;

/// Support points with less probability mass than this are dropped and the
/// remaining probabilities renormalized.
pub const PROB_DROP_TOL: f64 = 1e-14;

/// Per-item ambiguity data: support, mean, MAD, and optional extras.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSpec {
    /// Lower support endpoint.
    pub a: f64,
    /// Mean demand.
    pub mu: f64,
    /// Upper support endpoint (finite).
    pub b: f64,
    /// Mean absolute deviation E|D - mu|.
    pub mad: f64,
    /// P(D >= mu), required only by the lower-bound (best-case) model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Standard deviation, used only by mean-variance baselines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

impl MomentSpec {
    pub fn new(a: f64, mu: f64, b: f64, mad: f64) -> Self {
        Self {
            a,
            mu,
            b,
            mad,
            beta: None,
            sigma: None,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = Some(sigma);
        self
    }

    /// The tight upper bound on the MAD given the mean and support,
    /// `2(b - mu)(mu - a)/(b - a)`; zero for a degenerate support.
    pub fn mad_upper_bound(&self) -> f64 {
        if self.b - self.a <= 0.0 {
            0.0
        } else {
            2.0 * (self.b - self.mu) * (self.mu - self.a) / (self.b - self.a)
        }
    }

    /// Feasible range for `beta` given the other moments. Degenerate
    /// denominators relax the corresponding side to 0 or 1.
    pub fn beta_bounds(&self) -> (f64, f64) {
        let lo = if self.b - self.mu > BOUND_TOL {
            self.mad / (2.0 * (self.b - self.mu))
        } else {
            0.0
        };
        let hi = if self.mu - self.a > BOUND_TOL {
            1.0 - self.mad / (2.0 * (self.mu - self.a))
        } else {
            1.0
        };
        (lo, hi)
    }

    /// Checks every invariant and returns the full report; never panics or
    /// aborts on bad data.
    pub fn validate(&self) -> ValidationReport {
        validate_moment_spec(self)
    }

    /// True when the mean sits on a support endpoint, which forces a point
    /// mass at `mu`.
    pub fn is_degenerate(&self) -> bool {
        self.mu - self.a <= 0.0 || self.b - self.mu <= 0.0
    }

    fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::InfeasibleMoments(report))
        }
    }
}

/// Outcome of validating a [`MomentSpec`]: hard violations plus advisory
/// notes (boundary cases that are accepted but worth surfacing).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_ok() {
            write!(f, "ok")?;
            if !self.notes.is_empty() {
                write!(f, " (notes: {})", self.notes.join("; "))?;
            }
            Ok(())
        } else {
            write!(f, "{}", self.violations.join("; "))
        }
    }
}

/// Validates moment feasibility, reporting every violated invariant.
pub fn validate_moment_spec(spec: &MomentSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let MomentSpec {
        a,
        mu,
        b,
        mad,
        beta,
        sigma,
    } = *spec;

    for (name, v) in [("a", a), ("mu", mu), ("b", b), ("mad", mad)] {
        if !v.is_finite() {
            report
                .violations
                .push(format!("{name} must be finite, got {v}"));
        }
    }
    if !report.violations.is_empty() {
        return report;
    }

    if a < -BOUND_TOL {
        report
            .violations
            .push(format!("a must be nonnegative, got {a}"));
    }
    if mu < a - BOUND_TOL {
        report
            .violations
            .push(format!("mean {mu} below lower support {a}"));
    }
    if mu > b + BOUND_TOL {
        report
            .violations
            .push(format!("mean {mu} above upper support {b}"));
    }
    if mad < -BOUND_TOL {
        report
            .violations
            .push(format!("mad must be nonnegative, got {mad}"));
    }

    if b - a > BOUND_TOL {
        let bound = spec.mad_upper_bound();
        if mad > bound + BOUND_TOL {
            report
                .violations
                .push(format!("mad {mad} exceeds 2(b-mu)(mu-a)/(b-a) = {bound}"));
        } else if mad > 0.0 && (mad - bound).abs() <= BOUND_TOL {
            report.notes.push(format!(
                "mad equals its upper bound {bound}: the worst-case distribution puts no mass at the mean"
            ));
        }
    } else if mad > BOUND_TOL {
        report
            .violations
            .push(format!("mad must be 0 for a point support, got {mad}"));
    }

    if (mu - a <= BOUND_TOL || b - mu <= BOUND_TOL) && mad > BOUND_TOL {
        report
            .violations
            .push("mad must be 0 when the mean sits on a support endpoint".to_string());
    }

    if let Some(beta) = beta {
        if !beta.is_finite() || !(0.0..=1.0).contains(&beta) {
            report
                .violations
                .push(format!("beta must lie in [0, 1], got {beta}"));
        } else {
            let (lo, hi) = spec.beta_bounds();
            if beta < lo - BOUND_TOL {
                report
                    .violations
                    .push(format!("beta {beta} below mad/(2(b-mu)) = {lo}"));
            }
            if beta > hi + BOUND_TOL {
                report
                    .violations
                    .push(format!("beta {beta} above 1 - mad/(2(mu-a)) = {hi}"));
            }
        }
    }

    if let Some(sigma) = sigma {
        if !sigma.is_finite() || sigma < -BOUND_TOL {
            report
                .violations
                .push(format!("sigma must be nonnegative, got {sigma}"));
        } else if mad > sigma + BOUND_TOL {
            report
                .violations
                .push(format!("mad {mad} exceeds sigma {sigma}"));
        }
    }

    report
}

/// A finite discrete distribution with strictly increasing support points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    points: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    /// Builds a distribution, dropping points with mass below
    /// [`PROB_DROP_TOL`] and renormalizing the rest.
    pub fn new(points: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if points.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} points but {} probabilities",
                points.len(),
                probs.len()
            )));
        }
        let mut kept: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        for (&x, &p) in points.iter().zip(&probs) {
            if !x.is_finite() || !p.is_finite() {
                return Err(Error::InvalidDistribution("non-finite entry".to_string()));
            }
            if p < -BOUND_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "negative probability {p}"
                )));
            }
            if p >= PROB_DROP_TOL {
                kept.push((x, p));
            }
        }
        if kept.is_empty() {
            return Err(Error::InvalidDistribution(
                "all probabilities are zero".to_string(),
            ));
        }
        let total: f64 = kept.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        for w in kept.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidDistribution(
                    "support points must be strictly increasing".to_string(),
                ));
            }
        }
        let points = kept.iter().map(|&(x, _)| x).collect();
        let probs = kept.iter().map(|&(_, p)| p / total).collect();
        Ok(Self { points, probs })
    }

    pub fn point_mass(x: f64) -> Self {
        Self {
            points: vec![x],
            probs: vec![1.0],
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_point_mass(&self) -> bool {
        self.points.len() == 1
    }

    pub fn mean(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| x * p)
            .sum()
    }

    pub fn mad(&self) -> f64 {
        let mu = self.mean();
        self.points
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| (x - mu).abs() * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.points
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| (x - mu) * (x - mu) * p)
            .sum()
    }

    /// E(D - q)^+, the expected shortfall above `q`.
    pub fn expected_shortfall(&self, q: f64) -> f64 {
        self.points
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| (x - q).max(0.0) * p)
            .sum()
    }

    /// E(q - D)^+, the expected overage below `q`.
    pub fn expected_overage(&self, q: f64) -> f64 {
        self.points
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| (q - x).max(0.0) * p)
            .sum()
    }

    /// P(D >= x).
    pub fn prob_at_least(&self, x: f64) -> f64 {
        self.points
            .iter()
            .zip(&self.probs)
            .filter(|(pt, _)| **pt >= x)
            .map(|(_, p)| p)
            .sum()
    }

    /// P(D <= x).
    pub fn cdf(&self, x: f64) -> f64 {
        self.points
            .iter()
            .zip(&self.probs)
            .filter(|(pt, _)| **pt <= x)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        *self.points.last().unwrap()
    }
}

/// The distribution in the mean-MAD-range ambiguity set that maximizes the
/// expectation of any convex function: three points `{a, mu, b}` with
/// probabilities `mad/(2(mu-a))`, `1 - mad/(2(mu-a)) - mad/(2(b-mu))`,
/// `mad/(2(b-mu))`. Independent of the order quantity.
pub fn worst_case_three_point(spec: &MomentSpec) -> Result<DiscreteDistribution> {
    spec.ensure_valid()?;
    if spec.mad <= 0.0 || spec.is_degenerate() {
        return Ok(DiscreteDistribution::point_mass(spec.mu));
    }
    let p_low = spec.mad / (2.0 * (spec.mu - spec.a));
    let p_high = spec.mad / (2.0 * (spec.b - spec.mu));
    let p_mid = 1.0 - p_low - p_high;
    if p_mid < -BOUND_TOL {
        return Err(Error::InfeasibleMoments(spec.validate()));
    }
    DiscreteDistribution::new(
        vec![spec.a, spec.mu, spec.b],
        vec![p_low, p_mid.max(0.0), p_high],
    )
}

/// The distribution in the mean-MAD-beta ambiguity set that minimizes the
/// expectation of any convex function: two points
/// `mu - mad/(2(1-beta))` and `mu + mad/(2 beta)` with probabilities
/// `1 - beta` and `beta`.
pub fn best_case_two_point(spec: &MomentSpec) -> Result<DiscreteDistribution> {
    let beta = spec.beta.ok_or(Error::BetaRequired { item: 0 })?;
    spec.ensure_valid()?;
    if spec.mad <= 0.0 || spec.is_degenerate() {
        return Ok(DiscreteDistribution::point_mass(spec.mu));
    }
    let low = spec.mu - spec.mad / (2.0 * (1.0 - beta));
    let high = spec.mu + spec.mad / (2.0 * beta);
    DiscreteDistribution::new(vec![low, high], vec![1.0 - beta, beta])
}

/// The two-point distribution on `{a, b}` with probabilities
/// `(b-mu)/(b-a)` and `(mu-a)/(b-a)` that attains the Edmundson-Madansky
/// bound under mean-range information only.
pub fn mean_range_two_point(spec: &MomentSpec) -> Result<DiscreteDistribution> {
    spec.ensure_valid()?;
    if spec.b - spec.a <= 0.0 {
        return Ok(DiscreteDistribution::point_mass(spec.a));
    }
    let width = spec.b - spec.a;
    DiscreteDistribution::new(
        vec![spec.a, spec.b],
        vec![(spec.b - spec.mu) / width, (spec.mu - spec.a) / width],
    )
}

/// Named distribution families with a closed-form MAD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NamedDistribution {
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Standard beta with shapes `(alpha, beta)` rescaled to `[lo, hi]`.
    Beta {
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
    Normal {
        mean: f64,
        std_dev: f64,
    },
    /// Shape `k`, rate `lambda` (mean `k/lambda`).
    Gamma {
        shape: f64,
        rate: f64,
    },
}

impl NamedDistribution {
    /// Parses `name` plus a flat parameter list:
    /// `uniform [lo, hi]`, `beta [alpha, beta, lo, hi]`,
    /// `triangular [lo, hi, mode]`, `normal [mean, std_dev]`,
    /// `gamma [shape, rate]`.
    pub fn parse(name: &str, params: &[f64]) -> Result<Self> {
        let wrong_arity = |n: usize| {
            Error::InvalidParameters(format!(
                "{name} expects {n} parameters, got {}",
                params.len()
            ))
        };
        let dist = match name {
            "uniform" => {
                let &[lo, hi] = params else {
                    return Err(wrong_arity(2));
                };
                Self::Uniform { lo, hi }
            }
            "beta" => {
                let &[alpha, beta, lo, hi] = params else {
                    return Err(wrong_arity(4));
                };
                Self::Beta {
                    alpha,
                    beta,
                    lo,
                    hi,
                }
            }
            "triangular" => {
                let &[lo, hi, mode] = params else {
                    return Err(wrong_arity(3));
                };
                Self::Triangular { lo, hi, mode }
            }
            "normal" => {
                let &[mean, std_dev] = params else {
                    return Err(wrong_arity(2));
                };
                Self::Normal { mean, std_dev }
            }
            "gamma" => {
                let &[shape, rate] = params else {
                    return Err(wrong_arity(2));
                };
                Self::Gamma { shape, rate }
            }
            other => return Err(Error::UnknownFamily(other.to_string())),
        };
        dist.check_params()?;
        Ok(dist)
    }

    fn check_params(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        match *self {
            Self::Uniform { lo, hi } => {
                // negated comparisons also reject NaN parameters
                #[allow(clippy::neg_cmp_op_on_partial_ord)]
                if !(lo < hi) {
                    return bad(format!("uniform requires lo < hi, got [{lo}, {hi}]"));
                }
            }
            Self::Beta {
                alpha,
                beta,
                lo,
                hi,
            } => {
                #[allow(clippy::neg_cmp_op_on_partial_ord)]
                if !(alpha > 0.0 && beta > 0.0) {
                    return bad(format!(
                        "beta requires positive shapes, got ({alpha}, {beta})"
                    ));
                }
                #[allow(clippy::neg_cmp_op_on_partial_ord)]
                if !(lo < hi) {
                    return bad(format!("beta requires lo < hi, got [{lo}, {hi}]"));
                }
            }
            Self::Triangular { lo, hi, mode } =>
            {
                #[allow(clippy::neg_cmp_op_on_partial_ord)]
                if !(lo < hi && lo <= mode && mode <= hi) {
                    return bad(format!(
                        "triangular requires lo <= mode <= hi with lo < hi, got ({lo}, {hi}, {mode})"
                    ));
                }
            }
            Self::Normal { std_dev, .. } =>
            {
                #[allow(clippy::neg_cmp_op_on_partial_ord)]
                if !(std_dev >= 0.0) {
                    return bad(format!("normal requires std_dev >= 0, got {std_dev}"));
                }
            }
            Self::Gamma { shape, rate } =>
            {
                #[allow(clippy::neg_cmp_op_on_partial_ord)]
                if !(shape > 0.0 && rate > 0.0) {
                    return bad(format!(
                        "gamma requires positive shape and rate, got ({shape}, {rate})"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Uniform { lo, hi } => (lo + hi) / 2.0,
            Self::Beta {
                alpha,
                beta,
                lo,
                hi,
            } => lo + (hi - lo) * alpha / (alpha + beta),
            Self::Triangular { lo, hi, mode } => (lo + hi + mode) / 3.0,
            Self::Normal { mean, .. } => mean,
            Self::Gamma { shape, rate } => shape / rate,
        }
    }

    /// The mean absolute deviation E|X - mean| in closed form.
    pub fn mad(&self) -> f64 {
        match *self {
            Self::Uniform { lo, hi } => (hi - lo) / 4.0,
            Self::Beta {
                alpha,
                beta,
                lo,
                hi,
            } => {
                let s = alpha + beta;
                let ln = alpha * alpha.ln() + beta * beta.ln() + ln_gamma(s)
                    - (s + 1.0) * s.ln()
                    - ln_gamma(alpha)
                    - ln_gamma(beta);
                2.0 * ln.exp() * (hi - lo)
            }
            Self::Triangular {
                lo: a,
                hi: b,
                mode: c,
            } => {
                // the two branches agree when a + b = 2c
                if a + b <= 2.0 * c {
                    2.0 * (b + c - 2.0 * a).powi(3) / (81.0 * (a - b) * (a - c))
                } else {
                    2.0 * (a + c - 2.0 * b).powi(3) / (81.0 * (a - b) * (b - c))
                }
            }
            Self::Normal { std_dev, .. } => (2.0 / std::f64::consts::PI).sqrt() * std_dev,
            Self::Gamma { shape: k, rate } => 2.0 * (k * k.ln() - ln_gamma(k) - k).exp() / rate,
        }
    }
}

/// MAD of a named family: `mad_of_named_distribution("uniform", &[10.0, 50.0])`.
pub fn mad_of_named_distribution(name: &str, params: &[f64]) -> Result<f64> {
    Ok(NamedDistribution::parse(name, params)?.mad())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(a: f64, mu: f64, b: f64, mad: f64) -> MomentSpec {
        MomentSpec::new(a, mu, b, mad)
    }

    #[test]
    fn validate_accepts_interior_mad() {
        // bound is 2*20*20/40 = 20 >= 10
        let r = spec(10.0, 30.0, 50.0, 10.0).validate();
        assert!(r.is_ok(), "{r}");
        assert!(r.notes.is_empty());
    }

    #[test]
    fn validate_accepts_degenerate_point_mass() {
        let r = spec(0.0, 0.0, 0.0, 0.0).validate();
        assert!(r.is_ok(), "{r}");
    }

    #[test]
    fn validate_rejects_mad_above_bound() {
        let r = spec(10.0, 30.0, 50.0, 25.0).validate();
        assert!(!r.is_ok());
        assert!(
            r.violations
                .iter()
                .any(|v| v.contains("exceeds 2(b-mu)(mu-a)/(b-a) = 20")),
            "{r}"
        );
    }

    #[test]
    fn validate_flags_mad_at_exact_bound() {
        let r = spec(10.0, 30.0, 50.0, 20.0).validate();
        assert!(r.is_ok(), "{r}");
        assert_eq!(r.notes.len(), 1);
        // the mu point is dropped from the worst case
        let d = worst_case_three_point(&spec(10.0, 30.0, 50.0, 20.0)).unwrap();
        assert_eq!(d.points(), &[10.0, 50.0]);
        assert!((d.probs()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn validate_checks_beta_and_sigma() {
        let ok = spec(10.0, 30.0, 50.0, 10.0)
            .with_beta(0.5)
            .with_sigma(12.0)
            .validate();
        assert!(ok.is_ok(), "{ok}");
        // beta bounds here are [0.25, 0.75]
        let low = spec(10.0, 30.0, 50.0, 10.0).with_beta(0.1).validate();
        assert!(low.violations.iter().any(|v| v.contains("below")), "{low}");
        let high = spec(10.0, 30.0, 50.0, 10.0).with_beta(0.9).validate();
        assert!(
            high.violations.iter().any(|v| v.contains("above")),
            "{high}"
        );
        let sig = spec(10.0, 30.0, 50.0, 10.0).with_sigma(5.0).validate();
        assert!(sig.violations.iter().any(|v| v.contains("sigma")), "{sig}");
    }

    #[test]
    fn validate_forces_zero_mad_on_degenerate_mean() {
        let r = spec(10.0, 10.0, 50.0, 1.0).validate();
        assert!(!r.is_ok());
    }

    #[test]
    fn worst_case_standard_item() {
        let d = worst_case_three_point(&spec(10.0, 30.0, 50.0, 10.0)).unwrap();
        assert_eq!(d.points(), &[10.0, 30.0, 50.0]);
        let expect = [0.25, 0.5, 0.25];
        for (p, e) in d.probs().iter().zip(expect) {
            assert!((p - e).abs() < 1e-15);
        }
        assert!((d.mean() - 30.0).abs() < 1e-12);
        assert!((d.mad() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn worst_case_zero_mad_is_point_mass() {
        let d = worst_case_three_point(&spec(10.0, 30.0, 50.0, 0.0)).unwrap();
        assert!(d.is_point_mass());
        assert_eq!(d.points(), &[30.0]);
    }

    #[test]
    fn worst_case_uniform_moments() {
        // uniform on [0,1]: mu = 1/2, mad = (b-a)/4 = 1/4
        let d = worst_case_three_point(&spec(0.0, 0.5, 1.0, 0.25)).unwrap();
        assert_eq!(d.points(), &[0.0, 0.5, 1.0]);
        for (p, e) in d.probs().iter().zip([0.25, 0.5, 0.25]) {
            assert!((p - e).abs() < 1e-15);
        }
    }

    #[test]
    fn worst_case_rejects_infeasible() {
        let err = worst_case_three_point(&spec(10.0, 30.0, 50.0, 25.0)).unwrap_err();
        assert!(matches!(err, Error::InfeasibleMoments(_)), "{err}");
    }

    #[test]
    fn best_case_symmetric_beta() {
        let d = best_case_two_point(&spec(10.0, 30.0, 50.0, 10.0).with_beta(0.5)).unwrap();
        assert_eq!(d.points(), &[20.0, 40.0]);
        assert_eq!(d.probs(), &[0.5, 0.5]);
        assert!((d.mean() - 30.0).abs() < 1e-12);
        assert!((d.mad() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn best_case_skewed_beta() {
        let d = best_case_two_point(&spec(10.0, 30.0, 50.0, 10.0).with_beta(0.25)).unwrap();
        let expect_low = 30.0 - 10.0 / 1.5;
        assert!((d.points()[0] - expect_low).abs() < 1e-12);
        assert!((d.points()[1] - 50.0).abs() < 1e-12);
        assert_eq!(d.probs(), &[0.75, 0.25]);
        assert!((d.mean() - 30.0).abs() < 1e-12);
        assert!((d.mad() - 10.0).abs() < 1e-12);
        assert!((d.prob_at_least(30.0) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn best_case_zero_mad() {
        let d = best_case_two_point(&spec(10.0, 30.0, 50.0, 0.0).with_beta(0.5)).unwrap();
        assert!(d.is_point_mass());
        assert_eq!(d.points(), &[30.0]);
    }

    #[test]
    fn best_case_requires_beta() {
        let err = best_case_two_point(&spec(10.0, 30.0, 50.0, 10.0)).unwrap_err();
        assert!(matches!(err, Error::BetaRequired { .. }));
    }

    #[test]
    fn mean_range_examples() {
        let d = mean_range_two_point(&spec(10.0, 30.0, 50.0, 10.0)).unwrap();
        assert_eq!(d.points(), &[10.0, 50.0]);
        assert_eq!(d.probs(), &[0.5, 0.5]);

        // mu = a collapses to a point mass at a
        let d = mean_range_two_point(&spec(0.0, 0.0, 1.0, 0.0)).unwrap();
        assert!(d.is_point_mass());
        assert_eq!(d.points(), &[0.0]);

        let d = mean_range_two_point(&spec(0.0, 0.75, 1.0, 0.2)).unwrap();
        assert_eq!(d.points(), &[0.0, 1.0]);
        assert!((d.probs()[0] - 0.25).abs() < 1e-15);
        assert!((d.probs()[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn mad_closed_forms() {
        assert!(
            (mad_of_named_distribution("uniform", &[10.0, 50.0]).unwrap() - 10.0).abs() < 1e-12
        );
        let normal = mad_of_named_distribution("normal", &[0.0, 1.0]).unwrap();
        assert!((normal - 0.797_884_560_802_865_4).abs() < 1e-12);
        let tri = mad_of_named_distribution("triangular", &[10.0, 50.0, 30.0]).unwrap();
        assert!((tri - 20.0 / 3.0).abs() < 1e-12);
        // beta(1,1) is uniform: (b-a)/4
        let beta11 = mad_of_named_distribution("beta", &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!((beta11 - 0.25).abs() < 1e-12);
        // gamma(1, lambda) is exponential: mad = 2/(e*lambda)
        let expo = mad_of_named_distribution("gamma", &[1.0, 2.0]).unwrap();
        assert!((expo - 2.0 / (std::f64::consts::E * 2.0)).abs() < 1e-12);
    }

    #[test]
    fn mad_triangular_branches_agree_at_boundary() {
        let left = NamedDistribution::Triangular {
            lo: 10.0,
            hi: 50.0,
            mode: 30.0 - 1e-9,
        }
        .mad();
        let right = NamedDistribution::Triangular {
            lo: 10.0,
            hi: 50.0,
            mode: 30.0 + 1e-9,
        }
        .mad();
        assert!((left - right).abs() < 1e-6);
    }

    #[test]
    fn mad_rejects_unknown_family() {
        let err = mad_of_named_distribution("weibull", &[1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::UnknownFamily(_)));
    }

    #[test]
    fn mad_rejects_bad_arity() {
        assert!(mad_of_named_distribution("uniform", &[1.0]).is_err());
    }

    #[test]
    fn worst_case_moments_match_on_random_specs() {
        let mut rng = crate::rng::SplitMix64::new(0xD15C);
        for _ in 0..500 {
            let a = rng.uniform(0.0, 20.0);
            let b = a + rng.uniform(0.5, 100.0);
            let mu = rng.uniform(a + 0.05 * (b - a), b - 0.05 * (b - a));
            let s = MomentSpec::new(a, mu, b, 0.0);
            let mad = rng.uniform(0.0, s.mad_upper_bound());
            let s = MomentSpec::new(a, mu, b, mad);
            let d = worst_case_three_point(&s).unwrap();
            assert!(
                (d.mean() - mu).abs() < 1e-12 * mu.abs().max(1.0),
                "mean drift"
            );
            assert!(
                (d.mad() - mad).abs() < 1e-12 * mad.abs().max(1.0),
                "mad drift"
            );
        }
    }

    #[test]
    fn best_case_moments_match_on_random_specs() {
        let mut rng = crate::rng::SplitMix64::new(0xBE7A);
        for _ in 0..500 {
            let a = rng.uniform(0.0, 20.0);
            let b = a + rng.uniform(0.5, 100.0);
            let mu = rng.uniform(a + 0.05 * (b - a), b - 0.05 * (b - a));
            let probe = MomentSpec::new(a, mu, b, 0.0);
            let mad = rng.uniform(1e-6, probe.mad_upper_bound() * 0.999);
            let probe = MomentSpec::new(a, mu, b, mad);
            let (lo, hi) = probe.beta_bounds();
            let beta = rng.uniform(lo, hi);
            let s = probe.with_beta(beta);
            let d = best_case_two_point(&s).unwrap();
            assert!((d.mean() - mu).abs() < 1e-12 * mu.abs().max(1.0));
            assert!((d.mad() - mad).abs() < 1e-12 * mad.abs().max(1.0));
            assert!((d.prob_at_least(mu) - beta).abs() < 1e-12);
            assert!(d.min() >= a - 1e-9 && d.max() <= b + 1e-9);
        }
    }
}
