use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The (A, B, C, D) -> (alpha, beta, gamma, delta) inversion divides by C.
    #[error("singular inverse: C = 0, the alpha/beta inversion divides by C")]
    SingularInverse,

    /// The Hamiltonian split needs delta > 0 to produce a positive oscillator.
    #[error("no harmonic minorant exists for delta = {delta} (requires delta > 0)")]
    NoMinorant { delta: f64 },

    /// Every ground-state lower bound here assumes delta > 0.
    #[error("lower bound not valid for delta = {delta} (requires delta > 0)")]
    BoundNotValid { delta: f64 },

    #[error("grid of {unknowns} unknowns exceeds the configured cap of {cap}")]
    Resource { unknowns: usize, cap: usize },

    #[error("sparse factorization failed: {0}")]
    Factorization(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
