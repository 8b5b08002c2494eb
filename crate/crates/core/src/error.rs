use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("field order {0} exceeds the supported maximum of 64")]
    UnsupportedOrder(u64),

    #[error("division by zero in GF({q})")]
    DivisionByZero { q: u32 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("no spread of {t}-flats exists in PG({d},q): {t}+1 does not divide {d}+1")]
    NoSpreadExists { d: usize, t: usize },

    #[error("cap search for {goal} points failed after {nodes} nodes")]
    SearchFailed { goal: usize, nodes: u64 },

    #[error("invalid generator matrix: {0}")]
    InvalidGenerator(String),

    #[error("infeasible partition: {0}")]
    InfeasiblePartition(String),

    #[error("declared type {0:?} needs supplementary blocks")]
    TypeNeedsSupplement(Vec<usize>),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("work of {needed} exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("design is not proper: block {block} has a full sub-block in layer {layer}")]
    NotProper { block: usize, layer: usize },

    #[error("deleting the points removes sub-block {layer} of block {block} entirely")]
    SubBlockSwallowed { block: usize, layer: usize },

    #[error("design does not verify at the cyclic shift {shift:?}")]
    ShiftTypeMissing { shift: Vec<usize> },

    #[error("design is not uniform: {0}")]
    NotUniform(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("inconsistent margins: {0}")]
    InconsistentMargins(String),

    #[error("integer overflow in exact arithmetic")]
    Overflow,
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameters(msg.into())
    }
}
