use thiserror::Error;

/// Errors produced by the library. Each variant carries a stable token
/// (see [`Error::token`]) so that callers such as the CLI can emit
/// machine-readable failure causes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("no inverse: {0} has no multiplicative inverse mod {1}")]
    NoInverse(u64, u64),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("matrix is singular over GF({0})")]
    SingularMatrix(u64),
    #[error("field mismatch: GF({0}) vs GF({1})")]
    FieldMismatch(u64, u64),
    #[error("graph matrix is not admissible: {0}")]
    NotAdmissible(String),
    #[error("generation exhausted after {0} attempts")]
    GenerationExhausted(u64),
    #[error("impossible configuration: {0}")]
    ImpossibleConfig(String),
    #[error("enumeration budget exceeded: {candidates} candidates > budget {budget}")]
    BudgetExceeded { candidates: u128, budget: u128 },
    #[error("pair (A, B) is not stabilizable: {0}")]
    NotStabilizable(String),
    #[error("agent system has no feedback gain K")]
    MissingGain,
    #[error("gain does not place a nilpotent closed loop: {0}")]
    BadGain(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Stable identifier for the error class, independent of the message.
    pub fn token(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NotPrime",
            Error::NoInverse(..) => "NoInverse",
            Error::Shape(_) => "ShapeError",
            Error::SingularMatrix(_) => "SingularMatrix",
            Error::FieldMismatch(..) => "FieldMismatch",
            Error::NotAdmissible(_) => "NotAdmissible",
            Error::GenerationExhausted(_) => "GenerationExhausted",
            Error::ImpossibleConfig(_) => "ImpossibleConfig",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::NotStabilizable(_) => "NotStabilizable",
            Error::MissingGain => "MissingGain",
            Error::BadGain(_) => "BadGain",
            Error::Parse { .. } => "ParseError",
            Error::Unsupported(_) => "Unsupported",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
