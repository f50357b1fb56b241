use thiserror::Error;

/// Every failure mode of the library.
///
/// Guard errors (`Overflow`, `Conditioning`) are expected in normal use: they
/// tell the caller that a direct route cannot be trusted at the requested
/// point and that the asymptotic route should be used instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("theta function too close to a zero (|theta| = {0:e})")]
    NearZero(f64),

    #[error("series or iteration did not converge: {0}")]
    Convergence(String),

    #[error("density is not normalizable: {0}")]
    Density(String),

    #[error("reflection coefficient is not strictly positive: {0}")]
    Positivity(String),

    #[error("exponent {exponent:.3} exceeds the guard {limit}")]
    Overflow { exponent: f64, limit: f64 },

    #[error("condition estimate {estimate:e} exceeds {limit:e}")]
    Conditioning { estimate: f64, limit: f64 },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("degenerate modulus {0} (too close to 1)")]
    Degeneracy(f64),

    #[error("no asymptotic formula at this point: {0}")]
    Range(String),
}

pub type Result<T> = std::result::Result<T, Error>;
