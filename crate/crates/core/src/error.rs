use alloc::string::String;

use crate::vec3::Point;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid density parameter: {0}")]
    InvalidDensity(String),
    #[error("non-finite evaluation point {0:?}")]
    NonFinitePoint(Point),
    #[error("invalid scaling: lambda must be finite and > 0, got {0}")]
    InvalidScaling(f64),
    #[error("invalid quadrature specification: {0}")]
    InvalidQuadrature(String),
    #[error("quadrature failure: integrand is {value} at node {node:?}")]
    QuadratureFailure { node: Point, value: f64 },
    #[error("unsupported evaluation path: {0}")]
    UnsupportedPath(String),
    #[error("singular point {0:?}: the Coulomb potential is undefined at the nucleus")]
    SingularPoint(Point),
    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("functional magnitude {value:e} at lambda = {lambda} is below the log-fit floor")]
    NearZeroFunctional { lambda: f64, value: f64 },
    #[error("functional changes sign across the lambda sweep (lambda = {lambda})")]
    SignChange { lambda: f64 },
    #[error("degenerate invariance fit: |q| = {q_hat:e} is below tolerance, no finite invariance degree")]
    DegenerateInvariance { q_hat: f64 },
    #[error("m = {m} is the invariance degree (p(m) = 0); use the invariance condition instead")]
    AtInvarianceDegree { m: f64 },
    #[error("invalid sample at {point:?}: {reason}")]
    InvalidSample { point: Point, reason: &'static str },
    #[error("coincident point pair {0:?}: the two-point kernel is singular")]
    CoincidentPair(Point),
    #[error("reference integral {0:e} is too close to zero")]
    DegenerateReference(f64),
    #[error("ratio variables undefined at {0:?}: first gradient component is zero")]
    RatioUndefined(Point),
    #[error("energy density mismatch: {0}")]
    WrongEnergyDensity(&'static str),
}
