use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration must contain at least one agent")]
    EmptyConfiguration,

    #[error("non-finite coordinate at agent {0}")]
    NonFinite(usize),

    #[error("agent count mismatch: {0} vs {1}")]
    AgentCountMismatch(usize, usize),

    #[error("heading undefined: agent 1 coincides with the center of mass")]
    DegenerateHeading,

    #[error("invalid formation shape: {0}")]
    InvalidShape(String),

    #[error(
        "configurations are not congruent: alignment residual {residual:.3e} exceeds {allowed:.3e}"
    )]
    NotCongruent { residual: f64, allowed: f64 },

    #[error("terminal configuration is a reflection of the initial one (residual {residual:.3e}); a planar rigid motion cannot realize it")]
    ReflectionRequired { residual: f64 },

    #[error("rigid formations need at least 2 agents, got {0}")]
    InvalidN(usize),

    #[error("horizon must be positive and finite, got {0}")]
    InvalidHorizon(f64),

    #[error("time {t} outside horizon [0, {t_f}]")]
    OutOfHorizon { t: f64, t_f: f64 },

    #[error("need at least 2 samples, got {0}")]
    InvalidSampleCount(usize),

    #[error("trajectory has no control samples")]
    MissingControls,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("time grid is not uniformly spaced")]
    NonUniformGrid,

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("invalid discretized problem: {0}")]
    InvalidProblem(String),

    #[error("constraint graph is not rigid at the initial configuration (rank {rank} < {needed})")]
    FlexibleConstraintGraph { rank: usize, needed: usize },

    #[error("direct solver did not converge after {iterations} outer iterations (violation {violation:.3e}, gradient {gradient:.3e})")]
    NotConverged {
        iterations: usize,
        violation: f64,
        gradient: f64,
    },

    #[error("solutions describe different problems: {0}")]
    MismatchedProblems(String),
}
