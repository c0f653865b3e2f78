use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value leaves the declared constant span: {0}")]
    NotRepresentable(String),
    #[error("exact tier unavailable: {0}")]
    ExactUnavailable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("invalid constant basis: {0}")]
    InvalidBasis(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("generators A{0} and A{1} do not commute")]
    NonCommuting(usize, usize),
    #[error("generator A{0} is not invertible")]
    SingularGenerator(usize),
    #[error("real field marker but {0} has a nonzero imaginary part")]
    NotReal(String),
    #[error("ambiguous eigenvalue clustering ({0}); increase the precision")]
    Clustering(String),
    #[error("block {0} has zero diagonal value")]
    SingularBlock(usize),
    #[error("vector is outside U: leading coordinate of block {0} vanishes")]
    NotInU(usize),
    #[error("target vector is not in the regular region U_u")]
    NotInRegularRegion,
    #[error("subspace is not invariant under generator A{0}")]
    NotInvariant(usize),
    #[error("inconsistent linear system: {0}")]
    Inconsistent(String),
    #[error("property D hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("insufficient points: {found} within the largest scale, need {needed}")]
    InsufficientPoints { found: usize, needed: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    /// Errors after which the numeric tier can take over.
    pub fn is_tier_limit(&self) -> bool {
        matches!(self, Error::NotRepresentable(_) | Error::ExactUnavailable(_))
    }
}
