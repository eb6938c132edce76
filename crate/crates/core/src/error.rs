use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A label, location or DoF outside the declared space.
    #[error("domain error: {0}")]
    Domain(String),

    /// Mismatched dimensions or DoF layouts.
    #[error("shape error: {0}")]
    Shape(String),

    #[error("degenerate state: norm {0:e} is zero")]
    DegenerateState(f64),

    #[error("degenerate trace: |Tr| = {0:e}")]
    DegenerateTrace(f64),

    #[error("post-selection impossible: weight {0:e}")]
    PostSelectionImpossible(f64),

    #[error("region {0} carries no support")]
    DegenerateRegion(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    Convergence(usize),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
