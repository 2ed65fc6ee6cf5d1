use thiserror::Error;

use crate::moments::ValidationReport;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Moment data violates a feasibility bound; the report lists every
    /// violated invariant.
    #[error("infeasible moments: {0}")]
    InfeasibleMoments(ValidationReport),

    /// An operation that needs the skewness parameter `beta = P(D >= mu)`
    /// was called on an item without one.
    #[error("beta required for lower bound (item {item})")]
    BetaRequired { item: usize },

    /// A discrete distribution failed its structural invariants.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Unrecognized distribution family name.
    #[error("unknown distribution family `{0}`")]
    UnknownFamily(String),

    /// Parameters outside the domain of the requested operation.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// Input vectors whose lengths must agree do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A constraint system admits no feasible point.
    #[error("infeasible constraint system")]
    InfeasibleConstraints,

    /// Relative regret against a reference policy with zero cost.
    #[error("EVAI undefined at zero optimal cost")]
    EvaiUndefined,

    /// Scenario enumeration would exceed the hard cap.
    #[error(
        "scenario explosion ({items} items gives 3^{items} scenarios); use smaller n (max {max})"
    )]
    TooManyScenarios { items: usize, max: usize },

    /// The simplex solver lost numerical footing (iteration limit or a
    /// singular basis after refactorization).
    #[error("numerical failure in LP solve: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
