use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown family: {0}")]
    UnknownFamily(String),

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("point {point} is outside the domain {domain}")]
    OutOfDomain { point: String, domain: String },

    #[error("t = {t} is outside the maximal interval ({lo}, {hi})")]
    OutOfInterval { t: f64, lo: f64, hi: f64 },

    #[error("jet order {order} exceeds the configured cap {cap}")]
    OrderTooLarge { order: usize, cap: usize },

    #[error("jet coefficients overflowed at order {order}; retry with extended precision")]
    JetOverflow { order: usize },

    #[error("jet order {have} is insufficient, {need} required")]
    JetOrderInsufficient { have: usize, need: usize },

    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),

    #[error("no admissible metric for profile: {0}")]
    NoAdmissibleFamily(String),

    #[error("metric is not positive definite at {0}")]
    NotPositiveDefinite(String),

    #[error("quadrature did not reach tolerance {requested:e} (achieved {achieved:e})")]
    QuadratureFailure { achieved: f64, requested: f64 },

    #[error("the weighted Hilbert space is empty (every monomial norm diverges)")]
    EmptySpace,

    #[error("kernel series did not converge within degree {degree}")]
    NoConvergence { degree: usize },

    #[error("least-squares system is ill-conditioned (condition estimate {condition:e}); rescale the basis or the grid")]
    IllConditioned { condition: f64 },

    #[error("series tail not certified at t = {t} (bound {bound:e})")]
    TailNotConverged { t: f64, bound: f64 },

    #[error("exp(potential) is not expandable in monomials: {0}")]
    NotExpandable(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
