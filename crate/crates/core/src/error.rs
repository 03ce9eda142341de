use thiserror::Error;

/// Errors raised by gwlab operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    TowerMismatch,
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("field has no quadratic step to act on")]
    NoTopStep,
    #[error("{0} is a square in the field below; use a split algebra instead")]
    SquareAdjoined(String),
    #[error("tower height {height} exceeds the configured limit {limit}")]
    HeightLimit { height: usize, limit: usize },
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is degenerate")]
    DegenerateForm,
    #[error("matrix must be square and nonempty")]
    BadMatrix,
    #[error("element is not torsion")]
    NotTorsion,
    #[error("torsion exponent exceeds the search cap {0}")]
    TorsionCap(u32),
    #[error("element is not a unit")]
    NotAUnit,
    #[error("element does not lie in F_{0}")]
    NotInFiltration(u32),
    #[error("element does not lie in F_2")]
    NotInF2,
    #[error("trace form must have dimension 2, got {0}")]
    BadTraceForm(i64),
    #[error("algebra component does not extend the base field")]
    NotAnExtension,
    #[error("operation needs an algebra of degree 2, got degree {0}")]
    OddDegree(u64),
    #[error("group-ring elements have different variable counts")]
    ArityMismatch,
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("variable count {vars} exceeds the configured limit {limit}")]
    TooManyVariables { vars: usize, limit: usize },
    #[error("extracted coefficient does not reproduce the power: {0}")]
    ExtractionMismatch(String),
    #[error("equality could not be decided over this field: {0}")]
    Undecided(String),
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown field `{0}`")]
    UnknownField(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
