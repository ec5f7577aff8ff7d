use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Fock cutoff must be at least 1, got {0}")]
    InvalidCutoff(usize),

    #[error("Fock level {level} is outside the truncated basis 0..={n_max}")]
    CutoffViolation { level: usize, n_max: usize },

    #[error("cutoff mismatch: n_max = {left} vs n_max = {right}")]
    CutoffMismatch { left: usize, right: usize },

    #[error("truncation error: tail mass {tail:.3e} exceeds tolerance {tolerance:.3e}")]
    Truncation { tail: f64, tolerance: f64 },

    #[error("entanglement parameter q = {0} is outside [0, 1)")]
    InvalidEntanglement(f64),

    #[error("squeezing must be a finite non-negative dB value, got {0}")]
    InvalidSqueezing(f64),

    #[error("duplicate mode label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown mode label `{0}`")]
    UnknownLabel(String),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("quadrature radius {radius} is too small for q = {q}")]
    GridMismatch { q: f64, radius: f64 },

    #[error("loss and gain conditional densities do not cross for q = {q}")]
    NoCrossing { q: f64 },

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rejection envelope violated: density ratio {ratio:.6e} exceeds bound {bound:.6e}")]
    EnvelopeViolated { ratio: f64, bound: f64 },

    #[error("shot {index}: {source}")]
    Shot {
        index: u64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
