use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}` = {value}: {reason}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid position grid: {0}")]
    InvalidGrid(String),

    #[error("invalid oracle configuration: {0}")]
    InvalidOracleConfig(String),

    #[error("damping per flight θ = {theta} exceeds the supported maximum {max}")]
    DampingTooStrong { theta: f64, max: f64 },

    #[error("oracle quadrature did not converge: node doubling changed the profile by {change:.3e} of its peak (limit {limit:.1e})")]
    Convergence { change: f64, limit: f64 },

    #[error("internal numerical error: {0}")]
    Numerical(String),

    #[error("profile cannot be analysed: {0}")]
    Profile(String),
}

impl Error {
    pub(crate) fn param(field: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            field,
            value,
            reason,
        }
    }
}
