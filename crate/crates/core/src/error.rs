use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a supported prime modulus")]
    InvalidField(u64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("bilinear form is degenerate")]
    DegenerateForm,

    #[error("subspace is not totally isotropic")]
    NotIsotropic,

    #[error("expected a line, got a subspace of dimension {0}")]
    NotALine(usize),

    #[error("cannot parse diagram `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("diagram {0} is not admissible")]
    NotAdmissible(String),

    #[error("diagram {0} has no parity")]
    NoParity(String),

    #[error("diagram {diagram} has size ({d0},{d1}), expected (2n+1,2n)")]
    WrongSize { diagram: String, d0: usize, d1: usize },

    #[error("map is not nilpotent")]
    NotNilpotent,

    #[error("diagram {0} is not a hook")]
    NotHook(String),

    #[error("hook dimension formula is inconclusive for {diagram}: {reason}")]
    HookFormula { diagram: String, reason: String },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search budget of {budget} nodes exhausted")]
    BudgetExceeded { budget: u64 },

    #[error("flag is not in the fiber: {0}")]
    NotInFiber(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
