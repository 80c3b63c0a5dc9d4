use thiserror::Error;

pub type Result<T, E = SbtError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SbtError {
    #[error("curve is self-intersecting or nearly so (c_gamma estimate {c_gamma:.3e})")]
    SelfIntersection { c_gamma: f64 },
    #[error("curve is degenerate (raw length {length:.3e})")]
    DegenerateCurve { length: f64 },
    #[error("frame integration lost orthonormality (drift {drift:.3e})")]
    IntegrationFailure { drift: f64 },
    #[error("epsilon {eps} is not admissible (must satisfy 0 < eps < {limit})")]
    EpsilonTooLarge { eps: f64, limit: f64 },
    #[error("kernel evaluated at a singular point (|R| = {norm:.3e})")]
    SingularPoint { norm: f64 },
    #[error("evaluation point is too close to the centerline (distance {distance:.3e} < {limit:.3e})")]
    TooCloseToCenterline { distance: f64, limit: f64 },
    #[error("quadrature tolerance not met (estimated relative error {estimate:.3e}, tolerance {tol:.3e})")]
    ToleranceNotMet { estimate: f64, tol: f64 },
    #[error("degenerate least-squares fit (x variance {variance:.3e})")]
    DegenerateFit { variance: f64 },
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl SbtError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            SbtError::ToleranceNotMet { .. } => 3,
            SbtError::Io(_) => 1,
            _ => 2,
        }
    }
}
