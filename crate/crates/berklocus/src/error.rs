use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field context: {0}")]
    InvalidContext(String),
    #[error("element has negative valuation")]
    NegativeValuation,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("needs extension of the working field to ramification {n}, unramified degree {k}")]
    NeedsExtension { n: usize, k: usize },
    #[error("map is the identity")]
    IdentityMap,
    #[error("point is not fixed")]
    NotFixed,
    #[error("a fixed point has multiplier exactly 1")]
    MultiplierOne,
    #[error("map is constant")]
    ConstantMap,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("tangent map is the identity")]
    IdentityTangentMap,
    #[error("arc is not fixed and indifferent")]
    ArcNotFixed,
    #[error("exploration incomplete: {0}")]
    ExplorationIncomplete(String),
    #[error("component is classical")]
    ClassicalComponent,
    #[error("component is not hyperbolic")]
    NotHyperbolic,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("component is not indifferent")]
    NotIndifferent,
    #[error("map has no totally ramified fixed point")]
    NoTotallyRamifiedFixedPoint,
    #[error("map does not have degree one")]
    NotDegreeOne,
    #[error("wrong case for this operation")]
    WrongCase,
}

pub type Result<T> = std::result::Result<T, Error>;
