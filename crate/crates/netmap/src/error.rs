use thiserror::Error;

/// Errors raised by the library. `exit_category` groups them into the
/// CLI exit-code classes: 2 parse, 3 domain-invariant violation,
/// 4 infeasible query.
#[derive(Debug, Error)]
pub enum Error {
    #[error("orientation: presentation matrix must have positive determinant, got {0}")]
    Orientation(i64),
    #[error("lattice basis is singular")]
    SingularLattice,
    #[error("invalid elementary divisors ({m},{n}): need n | m and both positive")]
    InvalidDivisors { m: i64, n: i64 },
    #[error("degree must be at least 2")]
    DegreeTooSmall,
    #[error("not a Hurwitz structure set: {0}")]
    NotHurwitzStructureSet(String),
    #[error("not special: {0}")]
    NotSpecial(String),
    #[error("element is not in the pure modular group")]
    NotPure,
    #[error("matrix is not unimodular (determinant {0})")]
    NotUnimodular(i64),
    #[error("non-slope: {0}")]
    NonSlope(String),
    #[error("inconsistent slope data: {0}")]
    InconsistentSlopeData(String),
    #[error("slope oracle insufficient, missing slopes: {0}")]
    OracleInsufficient(String),
    #[error("element is not liftable")]
    NotLiftable,
    #[error("not a lift: {0}")]
    NotALift(String),
    #[error("malformed portrait: {0}")]
    MalformedPortrait(String),
    #[error("translation not in the sublattice")]
    InvalidTranslation,
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("portrait not realizable with divisors ({m},{n})")]
    NotRealizable { m: i64, n: i64 },
    #[error("divisors ({m},{n}) do not multiply to degree {degree}")]
    DivisorDegreeMismatch { degree: i64, m: i64, n: i64 },
    #[error("internal: {0}")]
    Internal(String),
}

impl Error {
    /// CLI exit code class for this error.
    pub fn exit_category(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::NotLiftable | Error::OracleInsufficient(_) | Error::NotRealizable { .. } => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
