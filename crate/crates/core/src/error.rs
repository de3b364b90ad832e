use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("subconjugacy fails: {element}⁻¹ {subgroup} {element} is not contained in {target}")]
    Subconjugacy {
        element: String,
        subgroup: String,
        target: String,
    },
    #[error("morphisms are not composable")]
    MorphismMismatch,
    #[error("face index {index} out of range for a {dim}-simplex")]
    FaceIndex { index: usize, dim: usize },
    #[error("invalid simplicial set: {0}")]
    InvalidSimplicialSet(String),
    #[error("invalid group action: {0}")]
    InvalidAction(String),
    #[error("invalid coefficient system: {0}")]
    InvalidCoefficients(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear system has no solution")]
    NoSolution,
    #[error("composite of consecutive differentials is nonzero")]
    NotAComplex,
    #[error("degree {degree} requires truncation at least {required}, have {available}")]
    InsufficientTruncation {
        degree: usize,
        required: usize,
        available: usize,
    },
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
