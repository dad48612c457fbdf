use thiserror::Error;

/// Everything that can go wrong while building, loading or running a network.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("argument outside the domain of {function}: {value}")]
    Domain { function: &'static str, value: String },

    #[error("matrix is singular (determinant {det})")]
    Singular { det: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("invalid automaton: {0}")]
    InvalidDfa(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("gate {row} at step {step} multiplies an infinite weight by an exact zero")]
    GateDegenerate { step: usize, row: usize },

    #[error("infinite weights cancel in gate {row} (+inf - inf)")]
    InfiniteCancellation { row: usize },

    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),

    #[error("k = {k} is too small for n = {n}: {reason}")]
    KTooSmall { n: usize, k: u32, reason: String },

    #[error("error bound violated at step {step}: |eps| = {eps} >= {bound}")]
    BoundViolated {
        step: usize,
        eps: String,
        bound: String,
    },

    #[error("reachable state budget of {0} exceeded")]
    StateBudgetExceeded(usize),

    #[error("state decoding is ambiguous: residuals {0} and {1} tie")]
    Ambiguous(String, String),

    #[error("network output is not guaranteed nonnegative: {0}")]
    NegativeOutput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::KTooSmall { .. }
            | Error::GateDegenerate { .. }
            | Error::BoundViolated { .. }
            | Error::InfiniteCancellation { .. }
            | Error::DivisionByZero(_)
            | Error::Singular { .. }
            | Error::Domain { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
