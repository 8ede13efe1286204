use thiserror::Error;

/// Errors produced by the correlation-function evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid detector geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    /// The requested evaluator has no closed form for this ensemble.
    #[error("unsupported ensemble (N = {atoms}, n_e = {excitations}): {reason}")]
    UnsupportedEnsemble {
        atoms: usize,
        excitations: usize,
        reason: &'static str,
    },

    #[error("state vector for {atoms} atoms exceeds the capacity of {max} atoms")]
    Capacity { atoms: usize, max: usize },

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    /// Normalized g2 requested at a detector position with vanishing intensity.
    #[error(
        "g2 undefined: intensity vanishes (G1(delta1) = {g1_at_1:e}, G1(delta2) = {g1_at_2:e})"
    )]
    UndefinedCorrelation { g1_at_1: f64, g1_at_2: f64 },

    #[error("visibility undefined for an all-zero signal")]
    UndefinedVisibility,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
