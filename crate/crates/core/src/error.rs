use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The secular value came out with a non-negligible imaginary part.
    #[error("secular value is not real at t = {t}, Z = {z}: |Im| = {imag:.3e} exceeds tolerance {tol:.1e}")]
    NonReal { t: f64, z: f64, imag: f64, tol: f64 },

    /// An evaluation failed while scanning; the offending abscissa is attached.
    #[error("evaluation failed at t = {t}: {source}")]
    AtPoint {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn at(t: f64, source: Error) -> Self {
        match source {
            e @ Error::AtPoint { .. } => e,
            e => Error::AtPoint {
                t,
                source: Box::new(e),
            },
        }
    }
}
