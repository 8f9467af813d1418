use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The Drude permittivity has a pole at zero frequency.
    #[error("permittivity diverges at xi_hat = 0")]
    PermittivityDiverges,

    #[error("non-finite intermediate in {0}")]
    NonFinite(&'static str),

    #[error("ell_max = {requested} exceeds the stability budget of {budget}")]
    StabilityBudget { requested: u32, budget: u32 },

    #[error("quadrature did not converge in {context}: relative change {rel_change:.3e} > {tolerance:.1e}")]
    Quadrature {
        context: &'static str,
        rel_change: f64,
        tolerance: f64,
    },

    /// `det(I - M)` came out non-positive, i.e. the round trip is not a contraction.
    #[error("det(I - M) is not positive for m = {m} at xi_hat = {xi_hat:e} nm^-1")]
    SpectralRadius { m: u32, xi_hat: f64 },

    #[error("curve is not monotonic in |E| near abscissa {0} nm")]
    NonMonotonic(f64),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
