use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("roots {0} and {1} coincide within tolerance")]
    RepeatedRoots(usize, usize),
    #[error("bad degree {0}: need an even number of roots, at least 6 (genus >= 2)")]
    BadDegree(usize),
    #[error("root {0} is not a finite complex number")]
    NonFiniteRoot(usize),
    #[error("point is not on the curve: |y^2 - f(x)| = {0:e}")]
    NotOnCurve(f64),
    #[error("coordinate {0} is outside the validity region of the {1} chart")]
    OutOfChart(String, &'static str),
    #[error("evaluation point lies on the singular support")]
    AtSingularSupport,
    #[error("negative-weight factor vanishes at the evaluation point")]
    PoleAtPoint,
    #[error("numerical procedure did not converge: {0}")]
    NonConvergent(String),
    #[error("bad excision: {0}")]
    BadExcision(String),
    #[error("operation requires genus {expected}, curve has genus {actual}")]
    WrongGenus { expected: usize, actual: usize },
    #[error("divisor is not effective")]
    NotEffective,
    #[error("divisor support meets a Weierstrass point")]
    DivisorHitsWeierstrass,
    #[error("hermitian form: {0}")]
    BadHermitian(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}
