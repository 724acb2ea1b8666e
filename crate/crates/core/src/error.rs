use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point lies outside the cone")]
    OutsideCone,
    #[error("cone sampler found no admissible point after {attempts} attempts")]
    Sampling { attempts: usize },
    #[error("level {sigma} is not attainable on the diagonal")]
    LevelOutOfRange { sigma: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("no subsolution up to t = {t_max}: node {node} has slack {slack}")]
    NoSubsolution { node: usize, slack: f64, t_max: f64 },
    #[error("line search step fell below the admissible floor at Newton iteration {iteration}")]
    NonAdmissibleStep { iteration: usize },
    #[error("Newton did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("linear solve stalled after {iterations} iterations (relative residual {relative_residual:e})")]
    LinearSolve { iterations: usize, relative_residual: f64 },
    #[error("continuation stuck: last accepted t = {last_t}")]
    ContinuationStuck { last_t: f64 },
    #[error("solve failed at eps = {eps:e}: {source}")]
    AtEpsilon { eps: f64, source: Box<Error> },
}
