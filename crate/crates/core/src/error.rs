use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input to {0}")]
    NonFinite(&'static str),

    #[error("parameter outside domain: {0}")]
    Domain(String),

    /// A denominator factor fell below the pole floor.
    #[error("pole in {factor} at factor index {index} (|value| = {magnitude:e})")]
    Pole {
        factor: &'static str,
        index: usize,
        magnitude: f64,
    },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(&'static str),

    #[error("genericity violated: |[{n}·{which}]| = {magnitude:e} is below the floor")]
    Genericity {
        which: &'static str,
        n: usize,
        magnitude: f64,
    },

    #[error("operator arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("balancing condition violated (residual {0:e})")]
    Balancing(f64),

    #[error("sampler found no pole-free point after {0} retries")]
    SamplerExhausted(usize),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
