use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("grid resolution too coarse: {0}")]
    Resolution(String),

    #[error("time grid violates Nyquist: dt·ω_max = {product:.4} > π")]
    Nyquist { product: f64 },

    #[error("truncation: {0}")]
    Truncation(String),

    #[error("conditioning event has zero probability (norm² = {norm2:e})")]
    ZeroNorm { norm2: f64 },

    #[error("invalid operator structure: {0}")]
    Structure(String),

    #[error("time ordering violated: t = {t} < t' = {t_prime}")]
    Ordering { t: f64, t_prime: f64 },

    #[error("momentum grid does not cover the required range: v_max = {v_max} < {required}")]
    Coverage { v_max: f64, required: f64 },

    #[error("invalid correlation kernel: {0}")]
    Kernel(String),

    #[error("quadratic generator out of validity range: smallest symplectic eigenvalue {nu_min}")]
    GeneratorMagnitude { nu_min: f64 },

    #[error("sampler budget of {nodes} nodes is below the minimum of {min}")]
    Precision { nodes: usize, min: usize },

    #[error("post-selection kept no shots (acceptance rate {rate})")]
    SelectionEfficiency { rate: f64 },

    #[error("observation window too short for the stationary limit: {0}")]
    Stationarity(String),

    #[error("{0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
