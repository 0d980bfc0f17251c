use thiserror::Error;

/// Errors raised by the engine.
///
/// Every variant maps to a stable numeric code (see [`Error::code`]) so that
/// the command-line front end can report distinct exit statuses.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulus {0} is not an odd prime below 2^31")]
    NotPrime(u64),
    #[error("cannot parse coefficient {0:?}")]
    BadCoefficient(String),
    #[error("polytope {index} does not contain the origin")]
    MissingOrigin { index: usize },
    #[error("point {point:?} has dimension {got}, expected {expected}")]
    DimensionMismatch { point: Vec<i64>, got: usize, expected: usize },
    #[error("semigroup is not pointed: {witness}")]
    NotPointed { witness: String },
    #[error("point {0:?} is not in the semigroup")]
    NotInSemigroup(Vec<i64>),
    #[error("point {point:?} needs more than {cap} generators (degree cap)")]
    DegreeCapExceeded { point: Vec<i64>, cap: u32 },
    #[error("zero polynomial has no {0}")]
    ZeroPolynomial(&'static str),
    #[error("rows of a Macaulay matrix must share one degree: {0}")]
    MixedDegrees(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("witness degree list has {got} entries for {expected} polynomials")]
    WitnessLength { got: usize, expected: usize },
    #[error("polynomial {poly} term {term} is not multihomogeneous of degree {expected:?}: {detail}")]
    NotMultihomogeneous { poly: usize, term: usize, expected: Vec<u32>, detail: String },
    #[error("system is not square: {polys} polynomials for {vars} affine variables")]
    NotSquare { polys: usize, vars: usize },
    #[error("Hilbert function changes between D_N and D_N+1 ({at_dn} vs {at_dn1}): solution set is not zero-dimensional")]
    NotZeroDimensional { at_dn: usize, at_dn1: usize },
    #[error("system has solutions at infinity (singular elimination block); apply a generic change of coordinates")]
    SolutionsAtInfinity,
    #[error("random change of coordinates stayed singular after {0} attempts")]
    SingularChange(usize),
    #[error("multiplication matrices do not commute ({0} and {1})")]
    NonCommuting(usize, usize),
    #[error("field too large for exhaustive root search (p = {0}, limit 2^20)")]
    FieldTooLarge(u64),
    #[error("exhaustive root search needs a prime field")]
    RootsNeedPrimeField,
    #[error("lexicographic basis is not triangular in variable {0}")]
    NotTriangular(usize),
    #[error("invalid input document: {0}")]
    Document(String),
    #[error("cross-validation failed for criteria {0:?}")]
    CriteriaFailed(Vec<u8>),
}

impl Error {
    /// Stable error code, used as process exit status by the CLI.
    pub fn code(&self) -> i32 {
        match self {
            Error::Document(_) => 10,
            Error::NotPrime(_) => 11,
            Error::BadCoefficient(_) => 12,
            Error::NotInSemigroup(_) | Error::DegreeCapExceeded { .. } => 13,
            Error::NotMultihomogeneous { .. } => 14,
            Error::MissingOrigin { .. } | Error::DimensionMismatch { .. } => 15,
            Error::NotPointed { .. } => 16,
            Error::NotSquare { .. } | Error::WitnessLength { .. } | Error::EmptyInput(_) => 17,
            Error::NotZeroDimensional { .. } | Error::SolutionsAtInfinity | Error::SingularChange(_) => 20,
            Error::FieldTooLarge(_) | Error::RootsNeedPrimeField | Error::NotTriangular(_) => 21,
            Error::DivisionByZero
            | Error::ZeroPolynomial(_)
            | Error::MixedDegrees(_)
            | Error::NonCommuting(..) => 30,
            Error::CriteriaFailed(_) => 40,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
