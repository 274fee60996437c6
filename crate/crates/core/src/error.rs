use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("q must be a prime ≥ 5 coprime to 6 (got {0})")]
    InvalidModulus(u32),
    #[error("q = {q} exceeds the supported limit (q < {limit})")]
    ModulusTooLarge { q: u32, limit: u32 },
    #[error("{h} is not a primitive root modulo {q}")]
    NotPrimitiveRoot { h: u32, q: u32 },
    #[error("{0} is not a square in the field")]
    NotASquare(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("gcd(0, 0) is undefined")]
    ZeroGcd,
    #[error("operation requires a non-zero polynomial")]
    ZeroPolynomial,
    #[error("inexact polynomial division")]
    InexactDivision,
    #[error("cannot parse polynomial from {0:?}")]
    Parse(String),
    #[error("discriminant is zero or constant")]
    ConstantDiscriminant,
    #[error("discriminant is real (even degree with square leading coefficient)")]
    RealDiscriminant,
    #[error("discriminant sign cannot be normalized to 1 or h by a unimodular change of variables")]
    UnnormalizableSign,
    #[error("matrix determinant is not a unit")]
    SingularMatrix,
    #[error("form is not partially reduced")]
    NotPartiallyReduced,
    #[error("form does not satisfy |A| = |C|")]
    UnequalNorms,
    #[error("degree bound must be between 1 and {max} (got {got})")]
    InvalidBound { got: u32, max: u32 },
    #[error("exhaustive recount supports q in {{5, 7}} and B <= 5 only (got q = {q}, B = {bound})")]
    OracleBounds { q: u32, bound: u32 },
}
