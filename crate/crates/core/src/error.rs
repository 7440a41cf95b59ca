use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("indeterminate sum: +inf and -inf")]
    IndeterminateSum,
    #[error("indeterminate difference: both operands are +inf")]
    IndeterminateDifference,
    #[error("integer overflow")]
    Overflow,
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("no closed form for this function")]
    UnsupportedForm,
    #[error("{0} is outside the effective domain")]
    DomainError(i128),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point is not primal feasible")]
    NotPrimalFeasible,
    #[error("dual vector is not sign-feasible at row {0}")]
    NotSignFeasible(usize),
    #[error("optimality criteria violated: {0}")]
    CriteriaViolated(String),
    #[error("degenerate system: {0}")]
    DegenerateSystem(String),
    #[error("problem is unbounded")]
    Unbounded,
    #[error("problem is infeasible")]
    Infeasible,
    #[error("the two base polyhedra have no common integer point")]
    EmptyIntersection,
    #[error("all slopes on T({0}) are infinite")]
    InfiniteSlope(usize),
    #[error("point is not feasible")]
    NotFeasible,
    #[error("value mismatch: primal {primal}, dual {dual}")]
    ValueMismatch { primal: String, dual: String },
    #[error("no feasible weight in the window")]
    NoFeasibleWeight,
}

pub type Result<T> = std::result::Result<T, Error>;
