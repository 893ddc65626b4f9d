use thiserror::Error;

/// Errors raised by the estimation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,
    #[error("sample contains a non-finite value at index {0}")]
    NonFiniteInput(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("moment of order {order} is not finite for {family}")]
    NonFiniteMoment { family: &'static str, order: f64 },
    #[error("correlant matrix is singular or ill-conditioned (det = {det:e}, cond = {cond:e})")]
    SingularSystem { det: f64, cond: f64 },
    #[error("g2 ratio is 0/0 at the degenerate point")]
    DegenerateRatio,
    #[error("g2 denominator is not positive ({0:e})")]
    NonPositiveDenominator(f64),
    #[error("quadrature did not converge (estimated error {0:e})")]
    QuadratureFailure(f64),
    #[error("root finder failed: {0}")]
    RootFinding(&'static str),
    #[error("sample of size {got} is below the minimum {min}")]
    SmallSample { got: usize, min: usize },
    #[error("every grid point is degenerate")]
    AllGridDegenerate,
    #[error("sample has zero variance")]
    ZeroVariance,
    #[error("unknown distribution spec `{0}`")]
    UnknownDistribution(alloc::string::String),
}

pub type Result<T> = core::result::Result<T, Error>;
