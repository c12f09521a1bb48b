use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("quadrature did not converge: {context} (estimated error {error:.3e})")]
    Quadrature { context: String, error: f64 },

    #[error("kernel profile did not converge at z = {worst_z:.6e} (relative change {change:.3e})")]
    ProfileConvergence { worst_z: f64, change: f64 },

    #[error("bound envelope ratio is not finite at t = {t:.6e}, |x| = {x:.6e}")]
    NonFiniteEnvelope { t: f64, x: f64 },

    #[error("spatial domain too small: neglected tail mass {tail_mass:.3e} at t = {t:.6e}")]
    Truncation { t: f64, tail_mass: f64 },

    #[error("picard iteration is not contracting (difference grew for {grew} consecutive iterations, last {last:.3e})")]
    NoContraction { grew: usize, last: f64 },

    #[error("picard iteration did not reach tolerance in {iters} iterations (last difference {last:.3e})")]
    PicardStalled { iters: usize, last: f64 },

    #[error("eigen-decomposition failed: {0}")]
    Eigen(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
