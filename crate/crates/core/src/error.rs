use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Bad construction parameters for a branch, system or vector.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("symbol {symbol} does not index a branch (system has {branches})")]
    InvalidSymbol { symbol: usize, branches: usize },

    #[error("partition invariant violated near x = {witness}: {reason}")]
    Partition { witness: f64, reason: String },

    #[error("preimage series diverges at s = {s}")]
    Divergence { s: f64 },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    /// The requested cylinder enumeration exceeds the work budget.
    #[error("work budget exceeded: {required} words needed, budget is {budget}; lower the depth")]
    Budget { required: u128, budget: u128 },

    #[error("indeterminate: Lyapunov bracket [{lo}, {hi}] does not exclude 0")]
    Indeterminate { lo: f64, hi: f64 },

    #[error("zero probability mass on the first {0} symbols")]
    ZeroMass(usize),

    #[error("inverse branch composition for word {word:?} is not contracting (expanding iterate missing?)")]
    NonContraction { word: Vec<usize> },

    #[error("root solve failed: {0}")]
    RootSolve(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
