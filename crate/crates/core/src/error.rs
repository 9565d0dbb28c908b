use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("incompatible series: {0}")]
    Incompatible(String),
    #[error("substituted series has order {order} below slot weight {weight}")]
    OrderTooLow { order: u32, weight: u32 },
    #[error("jet is not invertible: {0}")]
    NonInvertible(String),
    #[error("fixed-point iteration is not contractive: {0}")]
    NonContractive(String),
    #[error("reality condition violated: {0}")]
    RealityViolation(String),
    #[error("germ is of infinite type up to weight {0}")]
    InfiniteTypeToWeight(u32),
    #[error("all tested derivatives vanish to weight {0}")]
    ExceedsTruncation(u32),
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("germ does not contain the curve {{z=0, v=0}}")]
    GermLacksGamma,
    #[error("curve does not lie on the surface: {0}")]
    CurveNotOnSurface(String),
    #[error("curve is not transverse to the complex tangent")]
    CurveNotTransverse,
    #[error("type is not constant along the curve: {0}")]
    CurveTypeNotConstant(String),
    #[error("wrong model class: {0}")]
    ClassMismatch(String),
    #[error("not of class T2: {0}")]
    NotT2(String),
    #[error("point is not on the Levi degeneracy set: {0}")]
    PointNotOnSigma(String),
    #[error("exact computation would need an irrational number: {0}")]
    Irrational(String),
    #[error("numerical step failed: {0}")]
    StepFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
}
