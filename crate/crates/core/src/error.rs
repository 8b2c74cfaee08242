use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed field contexts")]
    MixedContexts,
    #[error("work bound exceeded: {bound} = {limit}, required {required}")]
    WorkBound {
        bound: &'static str,
        limit: u64,
        required: u64,
    },
    #[error("discriminant vanishes identically")]
    SingularCurve,
    #[error("constant j-invariant (isotrivial curve)")]
    ConstantJ,
    #[error("non-minimal at place {0}")]
    NonMinimal(String),
    #[error("wild ramification unsupported; supply degree explicitly")]
    WildRamification,
    #[error("not squarefree")]
    NotSquarefree,
    #[error("gcd condition violated: twist shares a factor with the multiplicative locus")]
    GcdCondition,
    #[error("stabilization failure: {0}")]
    Stabilization(String),
    #[error("not self-dual: invalid L-polynomial")]
    NotSelfDual,
    #[error("purity residual {0:e} above tolerance")]
    Purity(f64),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("quadrature did not converge")]
    Quadrature,
    #[error("{0}")]
    Unsupported(String),
    #[error("theorem check failed: {0}")]
    TheoremCheck(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
