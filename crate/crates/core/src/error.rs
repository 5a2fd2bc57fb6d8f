use thiserror::Error;

/// Errors raised anywhere in the simulator.
///
/// Every message is prefixed with the module that produced it so that
/// command-line users can tell configuration mistakes from numerical trouble.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain: invalid parameter: {0}")]
    Parameter(String),

    #[error("domain: degenerate mixture (all weights are zero)")]
    DegenerateMixture,

    #[error("{module}: invalid state: {detail}")]
    InvalidState { module: &'static str, detail: String },

    #[error("envelopes: a monochromatic profile has no pointwise amplitude")]
    MonochromaticEvaluation,

    #[error(
        "{module}: quadrature did not converge after {rounds} refinements \
         (last two estimates have magnitude {previous:.6e} and {last:.6e}, relative change {change:.3e})"
    )]
    Quadrature {
        module: &'static str,
        rounds: usize,
        previous: f64,
        last: f64,
        change: f64,
    },

    #[error("protocols: unsupported configuration: {0}")]
    Unsupported(String),

    #[error("protocols: resource limit: {0}")]
    Resource(String),

    #[error("{module}: numerical failure: {detail}")]
    Numerical { module: &'static str, detail: String },

    #[error("entanglement: inconsistent outcome set: {0}")]
    Consistency(String),

    #[error("optimizer: {0}")]
    Search(String),
}

impl Error {
    /// True for failures caused by the numerics rather than by the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::Numerical { .. } | Error::Consistency(_)
        )
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
