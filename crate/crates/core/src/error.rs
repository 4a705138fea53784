use crate::curves::Slope;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("0/0 is not a slope")]
    ZeroSlope,
    #[error("cannot parse `{0}`")]
    Parse(String),
    #[error("{0} and {1} are not Farey neighbours")]
    NotNeighbors(Slope, Slope),
    #[error("partial quotient a_{index} = {value} must be positive")]
    PartialQuotient { index: usize, value: i64 },
    #[error("continued fraction has only {available} partial quotients, {requested} requested")]
    Truncated { available: usize, requested: usize },
    #[error("Farey path to {slope} exceeds the cap of {cap}")]
    PathTooLong { slope: Slope, cap: i64 },
    #[error("degenerate trace triple: {0}")]
    Degenerate(String),
    #[error("Markov residual {residual:e} exceeds tolerance")]
    MarkovResidual { residual: f64 },
    #[error("no real Fuchsian point: discriminant {0} < 0")]
    NegativeDiscriminant(f64),
    #[error("minimizer failed: {0}")]
    Optimizer(String),
    #[error("length ladder did not settle within {budget} convergents (last gap {gap:e})")]
    LadderBudget { budget: usize, gap: f64 },
    #[error("laminations {0} and {1} do not intersect")]
    NotTransverse(String, String),
    #[error("({b}, {c}) lies outside the region, f({b}) = {f}")]
    OutsideRegion { b: f64, c: f64, f: f64 },
    #[error("Newton iteration failed: {0}")]
    Newton(String),
    #[error("discreteness check did not pass: {0}")]
    NotDiscrete(String),
    #[error("parabolic curve {0}")]
    Parabolic(String),
    #[error("point is not on the pleating variety (residual {0:e})")]
    NotOnVariety(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no bracketing sign change: {0}")]
    NoBracket(String),
}

pub type Result<T> = std::result::Result<T, Error>;
