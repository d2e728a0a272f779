use thiserror::Error;

/// Errors raised by the bound calculators, the simulators and the CLI layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A truncated Fock representation dropped more probability than allowed.
    #[error("precision error: truncated trace deficit {deficit:e} exceeds threshold {threshold:e}")]
    Precision { deficit: f64, threshold: f64 },

    /// A matrix routine produced something it should not have (e.g. a large
    /// negative eigenvalue of a density matrix).
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("grid has {size} rows, exceeding the cap of {cap}")]
    GridTooLarge { size: usize, cap: usize },

    /// Malformed grid or spec-file text.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if p.is_finite() && (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        domain(format!("{name} must lie in [0, 1], got {p}"))
    }
}

pub(crate) fn check_non_negative(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        domain(format!("{name} must be finite and non-negative, got {x}"))
    }
}
