use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("gram matrix is not square and symmetric")]
    NotSymmetric,
    #[error("degenerate gram matrix (det 0)")]
    Degenerate,
    #[error("lattice is not even: basis vector {0} has odd norm")]
    NotEven(usize),
    #[error("glue vector {index} = {vector} does not lie in the dual lattice")]
    GlueNotInDual { index: usize, vector: String },
    #[error("glue vectors {0} and {1} pair non-integrally ({2})")]
    NonIntegralPair(usize, usize, String),
    #[error("glue vector {0} has odd norm {1}")]
    OddGlue(usize, String),
    #[error("lattice is not definite")]
    Indefinite,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("vector is not integral in the ambient lattice: {0}")]
    NotIntegral(String),
    #[error("sublattice is not primitive (index {0})")]
    NotPrimitive(String),
    #[error("parameter constraint violated: {0}")]
    Param(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("self-check failed: {0}")]
    SelfCheck(String),
    #[error("unknown name: {0}")]
    Unknown(String),
}

pub type Result<T> = std::result::Result<T, LatticeError>;
