use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("signal {signal} has unconditional probability {prob:e}, below the 1e-12 floor")]
    ZeroProbabilitySignal { signal: usize, prob: f64 },

    #[error("belief distribution is not Bayes-plausible: mean deviates from the prior by {deviation:e}")]
    NotBayesPlausible { deviation: f64 },

    #[error("payoff cannot be evaluated: {0}")]
    Evaluation(String),

    #[error("prior is not in the convex hull of the belief grid")]
    GridTooCoarse,

    #[error("support reduction failed: {0}")]
    ReductionFailed(String),

    #[error("row sums of C deviate from the prior by {deviation:e}")]
    RowSumMismatch { deviation: f64 },

    #[error("majorization check requires a uniform prior")]
    NonUniformPrior,

    #[error("optimizer did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("sender payoff depends on the type for action {action}")]
    TypeDependentSenderPayoff { action: usize },

    #[error("cohort {cohort} has zero probability mass")]
    CohortZeroMass { cohort: usize },

    #[error("linear program failed: {0}")]
    Lp(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub(crate) fn check_len(expected: usize, got: usize, context: &'static str) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got, context })
    }
}
