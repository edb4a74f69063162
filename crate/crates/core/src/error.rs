use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("element {0} occurs twice in a condition")]
    DuplicateElement(usize),

    #[error("element {element} is outside the universe [0, {n})")]
    OutOfRange { element: usize, n: usize },

    #[error("length {len} exceeds the length cap {cap}")]
    LengthCap { len: usize, cap: usize },

    #[error("invalid universe: {0}")]
    InvalidUniverse(String),

    #[error("element {0} is already present in the condition")]
    AlreadyPresent(usize),

    #[error("conditions are incompatible: {0} and {1} are ordered oppositely")]
    Incompatible(usize, usize),

    #[error("{what} exceeded its budget of {limit}")]
    BudgetExceeded { what: &'static str, limit: u64 },

    #[error("query {u} < {v} is not answered by the given order")]
    UnansweredQuery { u: usize, v: usize },

    #[error("{0} exhausted")]
    Exhausted(&'static str),

    #[error("round {round}: player {player} returned a condition that does not extend its input")]
    ContractBreach { round: usize, player: String },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
