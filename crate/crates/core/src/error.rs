use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid number: {0}")]
    InvalidNumber(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("operands lie in different quadratic fields Q(sqrt {0}) and Q(sqrt {1})")]
    MixedFields(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("arithmetic on the point at infinity")]
    InfiniteOperand,
    #[error("{0} is outside the domain")]
    OutOfDomain(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("digit budget of {0} exhausted")]
    BudgetExceeded(usize),
    #[error("no fixed point of the period map lies in {0}")]
    NoRootInRange(String),
    #[error("rewrite position {0} out of range")]
    PositionOutOfRange(usize),
    #[error("unsupported head: {0}")]
    UnsupportedHead(String),
    #[error("expansion terminates before tail index {0}")]
    TailPastTermination(usize),
    #[error("{0} is not a quadratic irrational")]
    NotQuadratic(String),
    #[error("point is not in the image of the map")]
    NotInImage,
    #[error("degenerate denominator x + y = 0")]
    DegenerateDenominator,
    #[error("geodesic is equivalent to the imaginary axis")]
    ExcludedGeodesic,
    #[error("degenerate endpoints: {0}")]
    DegenerateEndpoints(String),
    #[error("geodesic is not in the reduction window")]
    OutOfWindow,
    #[error("no image of the geodesic lies in the admissible set")]
    NoLift,
    #[error("invalid runs: {0}")]
    InvalidRuns(String),
    #[error("circles do not intersect in the upper half plane")]
    NoIntersection,
    #[error("formula undefined: {0}")]
    FormulaUndefined(String),
    #[error("invalid period: {0}")]
    InvalidPeriod(String),
    #[error("dual system fails verification: {0}")]
    DualVerificationFailed(String),
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error("value does not fit: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
