use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid block structure: {0}")]
    InvalidStructure(String),

    #[error("structure mismatch: {left:?} vs {right:?}")]
    StructureMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("operator is not Hermitian")]
    NotHermitian,

    #[error("operator is not positive: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("operator is not a projection")]
    NotProjection,

    #[error("projection has zero rank")]
    ZeroProjection,

    #[error("operator has a nontrivial kernel")]
    NotInjective,

    #[error("operator is central; a counterexample cannot exist")]
    CentralOperator,

    #[error("non-finite entries")]
    NonFinite,

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("identity violated: {0}")]
    IdentityViolation(String),

    #[error("tail bound stayed above {epsilon:e} up to index {budget}")]
    TailBudgetExhausted { epsilon: f64, budget: usize },

    #[error("sequence is not Cauchy at the stated modulus: ‖ω_{m} − ω_{n}‖_a = {gap:e} > {bound:e}")]
    NotSummable { n: usize, m: usize, gap: f64, bound: f64 },

    #[error("malformed profile `{0}`")]
    Profile(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
