use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("max_iter exceeded after {iterations} iterations (last residual {residual:.3e})")]
    MaxIterExceeded { iterations: usize, residual: f64 },

    /// An iterate of the monotone scheme rose above its predecessor.
    #[error("monotonicity violated at sweep {sweep}: pointwise increase {excess:.3e}")]
    MonotonicityViolated { sweep: usize, excess: f64 },

    #[error("singular Jacobian (smallest singular value estimate {sigma_min:.3e})")]
    SingularJacobian { sigma_min: f64 },

    #[error("line search stalled at iteration {iteration} (residual {residual:.3e})")]
    LineSearchStalled { iteration: usize, residual: f64 },

    #[error("Newton failed after {} iterations; residual trace {trace:?}", trace.len())]
    NewtonFailed { trace: Vec<f64> },

    #[error("R too small: far-field value {value:.3e} exceeds 1e-4")]
    RadiusTooSmall { value: f64 },

    #[error("tail underresolved: only {points} mesh points in the fit range")]
    TailUnderresolved { points: usize },

    #[error("base not converged (residual {residual:.3e})")]
    BaseNotConverged { residual: f64 },

    #[error("iteration stagnated after {iterations} iterations")]
    Stagnated { iterations: usize },

    #[error("identical solutions (raw difference {norm:.3e})")]
    IdenticalSolutions { norm: f64 },

    #[error("radius exceeds chart")]
    RadiusExceedsChart,

    #[error("ladder too short: {len} converged entries, need at least {need}")]
    LadderTooShort { len: usize, need: usize },

    #[error("vortex mismatch: torus multiplicities {torus:?}, radial {radial:?}")]
    VortexMismatch { torus: (u32, u32), radial: (u32, u32) },

    #[error("solver failures exceed half of starts ({failed} of {total})")]
    TooManyFailures { failed: usize, total: usize },

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
